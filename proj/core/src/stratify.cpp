#include "mango/stratify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "mango/error.hpp"
#include "mango/manifest.hpp"
#include "mango/rng.hpp"

namespace mango {

namespace {

constexpr std::array<Category, 3> kPositiveOrder = {
    Category::StrongPositive, Category::MidPositive, Category::WeakPositive};

/// Apportions `total` seats over integer weights by largest remainder.
/// Remainder ties go to the lower index.
std::vector<std::size_t> largest_remainder(std::size_t total,
                                           const std::vector<int>& weights) {
  const double weight_sum =
      static_cast<double>(std::accumulate(weights.begin(), weights.end(), 0));
  std::vector<std::size_t> out(weights.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = static_cast<double>(total) * weights[i] / weight_sum;
    out[i] = static_cast<std::size_t>(std::floor(quota));
    assigned += out[i];
    remainders.push_back({quota - std::floor(quota), i});
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) {
              return a.first != b.first ? a.first > b.first
                                        : a.second < b.second;
            });
  for (std::size_t k = 0; assigned < total; ++k) {
    out[remainders[k % remainders.size()].second] += 1;
    ++assigned;
  }
  return out;
}

std::vector<RegionMeta> sample_bucket(std::vector<RegionMeta> bucket,
                                      std::size_t keep, std::uint64_t seed) {
  std::sort(bucket.begin(), bucket.end(),
            [](const RegionMeta& a, const RegionMeta& b) {
              return a.region_id < b.region_id;
            });
  if (keep >= bucket.size()) return bucket;
  Rng rng(seed);
  std::vector<RegionMeta> out;
  out.reserve(keep);
  for (std::size_t i : rng.sample_indices(bucket.size(), keep)) {
    out.push_back(bucket[i]);
  }
  return out;
}

}  // namespace

const char* to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw Error("unknown split '" + s + "'");
}

void StratifyConfig::validate() const {
  if (!(mid_min > 0.0 && mid_min < strong_min && strong_min < 1.0)) {
    throw Error("require 0 < mid_min < strong_min < 1");
  }
  for (int w : positive_weights) {
    if (w <= 0) throw Error("positive stratum weights must be positive");
  }
  if (!(ratio_tolerance >= 0.0)) throw Error("ratio_tolerance must be >= 0");
}

Category categorize(double fraction, const StratifyConfig& cfg) {
  cfg.validate();
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error("mangrove fraction outside [0,1]");
  }
  if (fraction >= cfg.strong_min) return Category::StrongPositive;
  if (fraction >= cfg.mid_min) return Category::MidPositive;
  if (fraction > 0.0) return Category::WeakPositive;
  return Category::PureNegative;
}

RatioEnforcement enforce_ratios(const std::vector<RegionMeta>& regions,
                                const StratifyConfig& cfg) {
  cfg.validate();

  std::map<Category, std::vector<RegionMeta>> buckets;
  for (const RegionMeta& r : regions) buckets[r.category].push_back(r);

  std::array<std::size_t, 3> supply{};
  for (std::size_t i = 0; i < 3; ++i) {
    supply[i] = buckets[kPositiveOrder[i]].size();
  }
  const std::size_t positives = supply[0] + supply[1] + supply[2];
  const std::size_t negatives = buckets[Category::PureNegative].size();
  if (positives == 0 || negatives == 0) throw Error("cannot balance");

  const std::size_t pos_total = std::min(positives, negatives);
  const std::vector<int> weights(cfg.positive_weights.begin(),
                                 cfg.positive_weights.end());
  const std::vector<std::size_t> targets = largest_remainder(pos_total, weights);

  // Take each stratum up to its target, then push the slack from
  // under-supplied strata into the ones with remaining supply, capped at
  // (1 + tolerance) times their target.
  std::array<std::size_t, 3> alloc{};
  std::array<std::size_t, 3> cap{};
  std::size_t allocated = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    alloc[i] = std::min(targets[i], supply[i]);
    const auto tolerated = static_cast<std::size_t>(
        std::floor(static_cast<double>(targets[i]) * (1.0 + cfg.ratio_tolerance)));
    cap[i] = std::min(supply[i], std::max(tolerated, alloc[i]));
    allocated += alloc[i];
  }
  std::size_t leftover = pos_total - allocated;
  while (leftover > 0) {
    std::vector<int> spare_weights;
    std::vector<std::size_t> spare_index;
    std::size_t spare_total = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      if (alloc[i] < cap[i]) {
        spare_weights.push_back(weights[i]);
        spare_index.push_back(i);
        spare_total += cap[i] - alloc[i];
      }
    }
    if (spare_total == 0) break;
    const std::size_t to_place = std::min(leftover, spare_total);
    const std::vector<std::size_t> grant =
        largest_remainder(to_place, spare_weights);
    std::size_t placed = 0;
    for (std::size_t k = 0; k < spare_index.size(); ++k) {
      const std::size_t i = spare_index[k];
      const std::size_t take = std::min(grant[k], cap[i] - alloc[i]);
      alloc[i] += take;
      placed += take;
    }
    if (placed == 0) break;
    leftover -= placed;
  }

  const std::size_t pos_final = alloc[0] + alloc[1] + alloc[2];
  const std::size_t neg_final = std::min(negatives, pos_final);

  RatioEnforcement result;
  for (std::size_t i = 0; i < 3; ++i) {
    const Category cat = kPositiveOrder[i];
    StratumReport rep;
    rep.supply = supply[i];
    rep.target = targets[i];
    rep.kept = alloc[i];
    rep.shortfall = targets[i] > alloc[i] ? targets[i] - alloc[i] : 0;
    result.strata[to_string(cat)] = rep;

    const std::uint64_t seed = splitmix64(cfg.seed ^ fnv1a64(to_string(cat)));
    for (RegionMeta& r : sample_bucket(buckets[cat], alloc[i], seed)) {
      result.selected.push_back(std::move(r));
    }
  }
  {
    StratumReport rep;
    rep.supply = negatives;
    rep.target = pos_final;
    rep.kept = neg_final;
    rep.shortfall = 0;
    result.strata[to_string(Category::PureNegative)] = rep;
    const std::uint64_t seed =
        splitmix64(cfg.seed ^ fnv1a64(to_string(Category::PureNegative)));
    for (RegionMeta& r :
         sample_bucket(buckets[Category::PureNegative], neg_final, seed)) {
      result.selected.push_back(std::move(r));
    }
  }

  std::sort(result.selected.begin(), result.selected.end(),
            [](const RegionMeta& a, const RegionMeta& b) {
              return a.region_id < b.region_id;
            });
  return result;
}

nlohmann::json RatioEnforcement::report_json() const {
  nlohmann::json strata_json = nlohmann::json::object();
  for (const auto& [name, rep] : strata) {
    strata_json[name] = {{"supply", rep.supply},
                         {"target", rep.target},
                         {"kept", rep.kept},
                         {"shortfall", rep.shortfall}};
  }
  return nlohmann::json{{"selected", selected.size()},
                        {"strata", std::move(strata_json)}};
}

void SplitConfig::validate() const {
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw Error("split fractions must be >= 0");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error("split fractions must sum to 1");
}

SplitOutcome country_disjoint_split(const std::vector<RegionMeta>& regions,
                                    const SplitConfig& cfg) {
  cfg.validate();

  std::map<std::string, std::vector<const RegionMeta*>> by_country;
  for (const RegionMeta& r : regions) {
    if (r.country_iso3.empty()) {
      throw Error("region " + r.region_id + " has no country code");
    }
    by_country[r.country_iso3].push_back(&r);
  }
  if (by_country.size() < 3) throw Error("cannot form disjoint splits");

  // Countries in (-size, iso3) order; each goes to the split with the
  // largest remaining deficit against its target region count.
  std::vector<std::pair<std::string, std::size_t>> countries;
  for (const auto& [iso3, members] : by_country) {
    countries.push_back({iso3, members.size()});
  }
  std::sort(countries.begin(), countries.end(),
            [](const auto& a, const auto& b) {
              return a.second != b.second ? a.second > b.second
                                          : a.first < b.first;
            });

  const double total = static_cast<double>(regions.size());
  Rng rng(cfg.seed);
  SplitOutcome outcome;
  std::array<double, 3> assigned = {0.0, 0.0, 0.0};
  for (const auto& [iso3, size] : countries) {
    std::array<double, 3> deficit;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < 3; ++s) {
      deficit[s] = cfg.fractions[s] * total - assigned[s];
      best = std::max(best, deficit[s]);
    }
    std::vector<std::size_t> tied;
    for (std::size_t s = 0; s < 3; ++s) {
      if (deficit[s] == best) tied.push_back(s);
    }
    const std::size_t pick =
        tied.size() == 1 ? tied[0]
                         : tied[static_cast<std::size_t>(rng.bounded(tied.size()))];
    assigned[pick] += static_cast<double>(size);
    outcome.country_counts[pick] += 1;
    outcome.region_counts[pick] += size;
    for (const RegionMeta* r : by_country[iso3]) {
      outcome.assignments.push_back(
          {r->region_id, iso3, static_cast<Split>(pick)});
    }
  }

  std::sort(outcome.assignments.begin(), outcome.assignments.end(),
            [](const SplitAssignment& a, const SplitAssignment& b) {
              return a.region_id < b.region_id;
            });
  return outcome;
}

nlohmann::json SplitOutcome::report_json() const {
  const std::size_t total =
      region_counts[0] + region_counts[1] + region_counts[2];
  nlohmann::json splits = nlohmann::json::object();
  for (std::size_t s = 0; s < 3; ++s) {
    const char* name = to_string(static_cast<Split>(s));
    splits[name] = {
        {"regions", region_counts[s]},
        {"countries", country_counts[s]},
        {"fraction", total == 0 ? 0.0
                                : static_cast<double>(region_counts[s]) /
                                      static_cast<double>(total)}};
  }
  return nlohmann::json{{"total_regions", total}, {"splits", std::move(splits)}};
}

nlohmann::json DatasetRecord::to_json() const {
  nlohmann::json j;
  j["region_id"] = region_id;
  j["country_iso3"] = country_iso3;
  j["category"] = to_string(category);
  j["mangrove_fraction"] = mangrove_fraction;
  j["sensing_date"] = sensing_date.to_string();
  j["image_path"] = image_path;
  j["mask_path"] = mask_path;
  if (validity_path) j["validity_path"] = *validity_path;
  j["method"] = method;
  j["selection_rule"] = selection_rule;
  if (split) j["split"] = to_string(*split);
  return j;
}

DatasetRecord DatasetRecord::from_json(const nlohmann::json& j) {
  DatasetRecord r;
  r.region_id = j.at("region_id").get<std::string>();
  r.country_iso3 = j.at("country_iso3").get<std::string>();
  r.category = category_from_string(j.at("category").get<std::string>());
  r.mangrove_fraction = j.at("mangrove_fraction").get<double>();
  // Selection reports carry the chosen acquisition as "chosen_date";
  // dataset records carry it as "sensing_date".
  const auto& date_field =
      j.contains("sensing_date") ? j.at("sensing_date") : j.at("chosen_date");
  r.sensing_date = Date::parse(date_field.get<std::string>());
  r.image_path = j.at("image_path").get<std::string>();
  r.mask_path = j.at("mask_path").get<std::string>();
  if (j.contains("validity_path") && !j["validity_path"].is_null()) {
    r.validity_path = j["validity_path"].get<std::string>();
  }
  r.method = j.at("method").get<std::string>();
  r.selection_rule = j.at("selection_rule").get<std::string>();
  if (j.contains("split") && !j["split"].is_null()) {
    r.split = split_from_string(j["split"].get<std::string>());
  }
  return r;
}

std::vector<DatasetRecord> read_dataset_records(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<DatasetRecord> records;
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
    try {
      records.push_back(DatasetRecord::from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad record: ") + e.what(), lineno);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(std::string("bad record: ") + e.what(), lineno);
    }
  }
  return records;
}

void write_dataset_records(const std::vector<DatasetRecord>& records,
                           const std::filesystem::path& path,
                           const std::optional<nlohmann::json>& header) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  if (header) {
    out << nlohmann::json{{"provenance", *header}}.dump() << '\n';
  }
  for (const DatasetRecord& r : records) {
    out << r.to_json().dump() << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

nlohmann::json composition_stats(const std::vector<DatasetRecord>& records) {
  static const std::array<Category, 4> kCategories = {
      Category::StrongPositive, Category::MidPositive, Category::WeakPositive,
      Category::PureNegative};

  nlohmann::json per_category = nlohmann::json::object();
  for (Category c : kCategories) per_category[to_string(c)] = 0;

  nlohmann::json per_split = nlohmann::json::object();
  nlohmann::json split_by_category = nlohmann::json::object();
  for (int s = 0; s < 3; ++s) {
    const char* name = to_string(static_cast<Split>(s));
    per_split[name] = 0;
    split_by_category[name] = per_category;
  }
  per_split["unsplit"] = 0;
  split_by_category["unsplit"] = per_category;

  nlohmann::json per_country = nlohmann::json::object();
  for (const DatasetRecord& r : records) {
    const char* cat = to_string(r.category);
    const char* split = r.split ? to_string(*r.split) : "unsplit";
    per_category[cat] = per_category[cat].get<std::size_t>() + 1;
    per_split[split] = per_split[split].get<std::size_t>() + 1;
    split_by_category[split][cat] =
        split_by_category[split][cat].get<std::size_t>() + 1;
    if (!per_country.contains(r.country_iso3)) {
      per_country[r.country_iso3] = 0;
    }
    per_country[r.country_iso3] =
        per_country[r.country_iso3].get<std::size_t>() + 1;
  }

  return nlohmann::json{{"total", records.size()},
                        {"per_category", std::move(per_category)},
                        {"per_split", std::move(per_split)},
                        {"split_by_category", std::move(split_by_category)},
                        {"per_country", std::move(per_country)}};
}

}  // namespace mango
