#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mango/date.hpp"

namespace mango {

/// One candidate acquisition in a newline-delimited JSON manifest.
/// cloud_fraction and coverage may be absent; the filter stage then falls
/// back to recomputing them from the validity grid.
struct ManifestRecord {
  std::string region_id;
  std::string country_iso3;
  Date sensing_date;
  std::string image_path;
  std::string mask_path;
  std::optional<std::string> validity_path;
  std::optional<double> cloud_fraction;
  std::optional<double> coverage;

  nlohmann::json to_json() const;
  static ManifestRecord from_json(const nlohmann::json& j);
};

/// Reads a JSONL manifest in file order. Lines holding a single "provenance"
/// object (the run header every tool writes) are skipped. Throws ParseError
/// with the line number on malformed lines, and Error on a duplicate
/// (region_id, sensing_date) pair.
std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path);

/// Writes records as JSONL. `header`, when given, is emitted first as
/// {"provenance": header}.
void write_manifest(const std::vector<ManifestRecord>& records,
                    const std::filesystem::path& path,
                    const std::optional<nlohmann::json>& header = std::nullopt);

/// True when the parsed line is a run-provenance header rather than a record.
bool is_provenance_line(const nlohmann::json& j);

}  // namespace mango
