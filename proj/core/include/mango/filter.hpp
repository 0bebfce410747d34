#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "mango/manifest.hpp"
#include "mango/raster.hpp"

namespace mango {

/// Cloud/coverage/year thresholds for candidate pool construction.
struct FilterConfig {
  double kappa = 0.05;  // cloud-fraction ceiling, candidates need C < kappa
  double omega = 0.50;  // coverage floor, candidates need coverage >= omega
  int year = 2020;

  void validate() const;
};

/// All surviving candidates of one region, sorted by sensing date ascending.
struct CandidatePool {
  std::string region_id;
  std::string country_iso3;
  std::string mask_path;
  std::vector<ManifestRecord> candidates;
};

struct FilterSummary {
  std::size_t regions_total = 0;
  std::size_t regions_empty = 0;
  std::size_t candidates_kept = 0;
  std::size_t candidates_dropped = 0;

  nlohmann::json to_json() const;
};

// When cloud and footprint flags are merged into one validity grid, the
// sensor footprint is taken to be the tile minus any all-invalid row/column
// blocks at the edges; remaining invalid pixels inside the footprint count
// as cloud. A fully invalid tile is treated as fully clouded.

/// Cloud pixel share of the full tile area.
double cloud_fraction(const Scene& scene);

/// Footprint share of the full tile area, independent of cloud.
double coverage(const Scene& scene);

/// Fills in missing cloud_fraction/coverage from the scene's validity grid.
/// Manifest-supplied values take precedence and are left untouched.
void resolve_quality_metadata(ManifestRecord& record, const Scene& scene);

/// Applies the pool predicate (cloud < kappa, coverage >= omega, sensing
/// date within the target year) per region. Every input region appears in
/// the output, empty pools included; pools are sorted by region_id and
/// candidates by date. Records of one region must agree on country and mask
/// path and must carry resolved cloud/coverage metadata.
std::pair<std::vector<CandidatePool>, FilterSummary> build_pool(
    const std::vector<ManifestRecord>& records, const FilterConfig& cfg);

/// The pool predicate on one record, exposed for oracle tests.
bool passes_filter(const ManifestRecord& record, const FilterConfig& cfg);

/// Groups records into per-region pools without applying any predicate
/// (the selection stage consumes an already-filtered manifest). Pools are
/// sorted by region_id, candidates by date; metadata consistency is checked.
std::vector<CandidatePool> group_pools(const std::vector<ManifestRecord>& records);

}  // namespace mango
