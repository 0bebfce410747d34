#include "mango/manifest.hpp"

#include <fstream>
#include <set>

#include "mango/error.hpp"

namespace mango {

namespace {

double checked_unit_interval(const nlohmann::json& j, const char* field) {
  const double v = j.get<double>();
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(std::string(field) + " outside [0,1]");
  }
  return v;
}

std::string checked_nonempty(const nlohmann::json& j, const char* field) {
  const std::string s = j.get<std::string>();
  if (s.empty()) throw Error(std::string(field) + " is empty");
  return s;
}

}  // namespace

nlohmann::json ManifestRecord::to_json() const {
  nlohmann::json j;
  j["region_id"] = region_id;
  j["country_iso3"] = country_iso3;
  j["sensing_date"] = sensing_date.to_string();
  j["image_path"] = image_path;
  j["mask_path"] = mask_path;
  if (validity_path) j["validity_path"] = *validity_path;
  if (cloud_fraction) j["cloud_fraction"] = *cloud_fraction;
  if (coverage) j["coverage"] = *coverage;
  return j;
}

ManifestRecord ManifestRecord::from_json(const nlohmann::json& j) {
  ManifestRecord r;
  r.region_id = checked_nonempty(j.at("region_id"), "region_id");
  r.country_iso3 = j.at("country_iso3").get<std::string>();
  if (r.country_iso3.size() != 3) {
    throw Error("country_iso3 must be a 3-letter code");
  }
  r.sensing_date = Date::parse(j.at("sensing_date").get<std::string>());
  r.image_path = checked_nonempty(j.at("image_path"), "image_path");
  r.mask_path = checked_nonempty(j.at("mask_path"), "mask_path");
  if (j.contains("validity_path") && !j["validity_path"].is_null()) {
    r.validity_path = checked_nonempty(j["validity_path"], "validity_path");
  }
  if (j.contains("cloud_fraction") && !j["cloud_fraction"].is_null()) {
    r.cloud_fraction = checked_unit_interval(j["cloud_fraction"], "cloud_fraction");
  }
  if (j.contains("coverage") && !j["coverage"].is_null()) {
    r.coverage = checked_unit_interval(j["coverage"], "coverage");
  }
  return r;
}

bool is_provenance_line(const nlohmann::json& j) {
  return j.is_object() && j.contains("provenance");
}

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::vector<ManifestRecord> records;
  std::set<std::pair<std::string, Date>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    if (is_provenance_line(j)) continue;
    ManifestRecord r;
    try {
      r = ManifestRecord::from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad record: ") + e.what(), lineno);
    } catch (const Error& e) {
      throw ParseError(std::string("bad record: ") + e.what(), lineno);
    }
    if (!seen.insert({r.region_id, r.sensing_date}).second) {
      throw Error("duplicate (region_id, sensing_date) pair (" + r.region_id +
                  ", " + r.sensing_date.to_string() + ") at line " +
                  std::to_string(lineno));
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_manifest(const std::vector<ManifestRecord>& records,
                    const std::filesystem::path& path,
                    const std::optional<nlohmann::json>& header) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  if (header) {
    out << nlohmann::json{{"provenance", *header}}.dump() << '\n';
  }
  for (const auto& r : records) {
    out << r.to_json().dump() << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace mango
