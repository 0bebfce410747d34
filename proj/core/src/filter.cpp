#include "mango/filter.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "mango/error.hpp"

namespace mango {

namespace {

struct Footprint {
  int row0 = 0, row1 = 0, col0 = 0, col1 = 0;  // half-open rect
  bool empty() const { return row0 >= row1 || col0 >= col1; }
  std::size_t area() const {
    return empty() ? 0
                   : static_cast<std::size_t>(row1 - row0) *
                         static_cast<std::size_t>(col1 - col0);
  }
};

bool row_all_invalid(const Scene& s, int r) {
  for (int c = 0; c < s.width; ++c) {
    if (s.is_valid(r, c)) return false;
  }
  return true;
}

bool col_all_invalid(const Scene& s, int c) {
  for (int r = 0; r < s.height; ++r) {
    if (s.is_valid(r, c)) return false;
  }
  return true;
}

Footprint footprint_rect(const Scene& s) {
  Footprint f{0, s.height, 0, s.width};
  while (f.row0 < f.row1 && row_all_invalid(s, f.row0)) ++f.row0;
  while (f.row1 > f.row0 && row_all_invalid(s, f.row1 - 1)) --f.row1;
  while (f.col0 < f.col1 && col_all_invalid(s, f.col0)) ++f.col0;
  while (f.col1 > f.col0 && col_all_invalid(s, f.col1 - 1)) --f.col1;
  return f;
}

}  // namespace

void FilterConfig::validate() const {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw Error("kappa outside [0,1]");
  if (!(omega >= 0.0 && omega <= 1.0)) throw Error("omega outside [0,1]");
}

nlohmann::json FilterSummary::to_json() const {
  return nlohmann::json{{"regions_total", regions_total},
                        {"regions_empty", regions_empty},
                        {"candidates_kept", candidates_kept},
                        {"candidates_dropped", candidates_dropped}};
}

double cloud_fraction(const Scene& scene) {
  const Footprint f = footprint_rect(scene);
  if (f.empty()) return 1.0;  // fully invalid tile: treated as fully clouded
  std::size_t cloud = 0;
  for (int r = f.row0; r < f.row1; ++r) {
    for (int c = f.col0; c < f.col1; ++c) {
      if (!scene.is_valid(r, c)) ++cloud;
    }
  }
  return static_cast<double>(cloud) / static_cast<double>(scene.pixel_count());
}

double coverage(const Scene& scene) {
  const Footprint f = footprint_rect(scene);
  return static_cast<double>(f.area()) /
         static_cast<double>(scene.pixel_count());
}

void resolve_quality_metadata(ManifestRecord& record, const Scene& scene) {
  if (!record.cloud_fraction) record.cloud_fraction = cloud_fraction(scene);
  if (!record.coverage) record.coverage = coverage(scene);
}

bool passes_filter(const ManifestRecord& record, const FilterConfig& cfg) {
  if (!record.cloud_fraction || !record.coverage) {
    throw Error("unresolved cloud_fraction/coverage for region " +
                record.region_id);
  }
  // Boundary semantics: strict < for cloud, closed >= for coverage.
  return *record.cloud_fraction < cfg.kappa &&
         *record.coverage >= cfg.omega &&
         record.sensing_date.year == cfg.year;
}

namespace {

std::vector<CandidatePool> group_records(
    const std::vector<ManifestRecord>& records,
    const std::function<bool(const ManifestRecord&)>& keep,
    std::size_t* kept, std::size_t* dropped) {
  std::map<std::string, CandidatePool> by_region;
  for (const auto& rec : records) {
    auto [it, inserted] = by_region.try_emplace(rec.region_id);
    CandidatePool& pool = it->second;
    if (inserted) {
      pool.region_id = rec.region_id;
      pool.country_iso3 = rec.country_iso3;
      pool.mask_path = rec.mask_path;
    } else if (pool.country_iso3 != rec.country_iso3 ||
               pool.mask_path != rec.mask_path) {
      throw Error("inconsistent region metadata for " + rec.region_id);
    }
    if (keep(rec)) {
      pool.candidates.push_back(rec);
      if (kept) ++*kept;
    } else if (dropped) {
      ++*dropped;
    }
  }

  std::vector<CandidatePool> pools;
  pools.reserve(by_region.size());
  for (auto& [id, pool] : by_region) {
    std::sort(pool.candidates.begin(), pool.candidates.end(),
              [](const ManifestRecord& a, const ManifestRecord& b) {
                return a.sensing_date < b.sensing_date;
              });
    pools.push_back(std::move(pool));
  }
  return pools;
}

}  // namespace

std::pair<std::vector<CandidatePool>, FilterSummary> build_pool(
    const std::vector<ManifestRecord>& records, const FilterConfig& cfg) {
  cfg.validate();
  FilterSummary summary;
  std::vector<CandidatePool> pools = group_records(
      records, [&](const ManifestRecord& r) { return passes_filter(r, cfg); },
      &summary.candidates_kept, &summary.candidates_dropped);
  for (const CandidatePool& pool : pools) {
    if (pool.candidates.empty()) ++summary.regions_empty;
  }
  summary.regions_total = pools.size();
  return {std::move(pools), summary};
}

std::vector<CandidatePool> group_pools(
    const std::vector<ManifestRecord>& records) {
  return group_records(records, [](const ManifestRecord&) { return true; },
                       nullptr, nullptr);
}

}  // namespace mango
