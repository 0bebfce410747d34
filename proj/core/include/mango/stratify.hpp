#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mango/date.hpp"
#include "mango/raster.hpp"

namespace mango {

enum class Split { Train, Val, Test };

const char* to_string(Split s);
Split split_from_string(const std::string& s);

struct StratifyConfig {
  double strong_min = 0.15;  // f >= strong_min           -> strong positive
  double mid_min = 0.05;     // mid_min <= f < strong_min -> mid positive
  std::array<int, 3> positive_weights = {2, 2, 1};  // strong : mid : weak
  // Over-supplied strata may absorb the slack left by under-supplied ones up
  // to this relative excess over their proportional target.
  double ratio_tolerance = 0.03;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Category from the mangrove fraction: strong (f >= 0.15), mid
/// (0.05 <= f < 0.15), weak (0 < f < 0.05), pure negative (f == 0), with
/// thresholds from the config. Throws Error outside [0,1].
Category categorize(double fraction, const StratifyConfig& cfg = {});

struct StratumReport {
  std::size_t supply = 0;
  std::size_t target = 0;
  std::size_t kept = 0;
  std::size_t shortfall = 0;  // target minus kept when under-supplied
};

struct RatioEnforcement {
  std::vector<RegionMeta> selected;  // sorted by region_id
  std::map<std::string, StratumReport> strata;  // keyed by category name

  nlohmann::json report_json() const;
};

/// Seeded subsampling without replacement so that positives and negatives
/// are balanced 1:1 and positive strata sit close to their weight-based
/// proportional targets (largest-remainder apportionment). Under-supplied
/// strata are taken whole with the shortfall reported; the slack moves to
/// strata that still have supply, within ratio_tolerance of their targets.
/// Throws Error("cannot balance") when positives or negatives are absent.
RatioEnforcement enforce_ratios(const std::vector<RegionMeta>& regions,
                                const StratifyConfig& cfg);

struct SplitAssignment {
  std::string region_id;
  std::string country_iso3;
  Split split = Split::Train;
};

struct SplitConfig {
  std::array<double, 3> fractions = {0.8, 0.1, 0.1};  // train, val, test
  std::uint64_t seed = 0;

  void validate() const;
};

struct SplitOutcome {
  std::vector<SplitAssignment> assignments;  // sorted by region_id
  std::array<std::size_t, 3> region_counts = {0, 0, 0};
  std::array<std::size_t, 3> country_counts = {0, 0, 0};

  nlohmann::json report_json() const;
};

/// Assigns whole countries to train/val/test by greedy packing: countries
/// in (-region_count, iso3) order each go to the split with the largest
/// remaining region deficit, ties broken by a seeded draw. No country ever
/// spans two splits. Throws Error with fewer than 3 countries.
SplitOutcome country_disjoint_split(const std::vector<RegionMeta>& regions,
                                    const SplitConfig& cfg);

/// One line of the final dataset manifest: region, country, category, the
/// chosen acquisition, file paths, and (once split) the assignment.
struct DatasetRecord {
  std::string region_id;
  std::string country_iso3;
  Category category = Category::PureNegative;
  double mangrove_fraction = 0.0;
  Date sensing_date;
  std::string image_path;
  std::string mask_path;
  std::optional<std::string> validity_path;
  std::string method;
  std::string selection_rule;
  std::optional<Split> split;

  nlohmann::json to_json() const;
  static DatasetRecord from_json(const nlohmann::json& j);

  RegionMeta meta() const {
    return RegionMeta{region_id, country_iso3, mangrove_fraction, category};
  }
};

/// Reads dataset records (or selection-report lines, which carry a superset
/// of the fields) from a JSONL file, skipping provenance headers.
std::vector<DatasetRecord> read_dataset_records(
    const std::filesystem::path& path);

void write_dataset_records(const std::vector<DatasetRecord>& records,
                           const std::filesystem::path& path,
                           const std::optional<nlohmann::json>& header);

/// Counts per category, per split, per country, plus a split-by-category
/// matrix. All-zero for an empty input.
nlohmann::json composition_stats(const std::vector<DatasetRecord>& records);

}  // namespace mango
