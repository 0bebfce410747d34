#include "mango/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>

#include "mango/error.hpp"
#include "mango/msr1.hpp"
#include "mango/parallel.hpp"
#include "mango/rng.hpp"
#include "mango/version.hpp"

namespace mango {

namespace fs = std::filesystem;

namespace {

char hex_digit(std::uint64_t v) {
  return static_cast<char>(v < 10 ? '0' + v : 'a' + (v - 10));
}

std::string hash_hex(const std::string& s) {
  std::uint64_t h = fnv1a64(s);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex_digit(h & 0xf);
    h >>= 4;
  }
  return out;
}

fs::path resolve(const std::string& p, const fs::path& base) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::optional<fs::path> resolve_opt(const std::optional<std::string>& p,
                                    const fs::path& base) {
  if (!p) return std::nullopt;
  return resolve(*p, base);
}

fs::path norm_base(const fs::path& base) {
  return base.empty() ? fs::path(".") : base.lexically_normal();
}

// Relative paths inside a manifest are interpreted against the manifest's
// directory; a stage writing records elsewhere rewrites them to stay valid.
std::string rebase_path(const std::string& p, const fs::path& from_base,
                        const fs::path& to_base) {
  const fs::path path(p);
  if (path.is_absolute()) return p;
  const fs::path joined = (norm_base(from_base) / path).lexically_normal();
  const fs::path rel = joined.lexically_relative(norm_base(to_base));
  return rel.empty() ? joined.string() : rel.string();
}

void rebase_record(ManifestRecord& rec, const fs::path& from_base,
                   const fs::path& mask_from_base, const fs::path& to_base) {
  rec.image_path = rebase_path(rec.image_path, from_base, to_base);
  rec.mask_path = rebase_path(rec.mask_path, mask_from_base, to_base);
  if (rec.validity_path) {
    rec.validity_path = rebase_path(*rec.validity_path, from_base, to_base);
  }
}

}  // namespace

nlohmann::json make_provenance(const std::string& command,
                               const nlohmann::json& config) {
  nlohmann::json p;
  p["tool"] = "mango-curate";
  p["version"] = kVersion;
  p["command"] = command;
  p["config"] = config;
  p["config_hash"] = hash_hex(command + config.dump());
  return p;
}

nlohmann::json run_filter(const FilterOptions& opts) {
  opts.config.validate();
  const fs::path base = opts.manifest.parent_path();
  std::vector<ManifestRecord> records = read_manifest(opts.manifest);

  // Manifest metadata wins; the validity grid is the fallback.
  const std::vector<std::string> resolve_errors = parallel_map<std::string>(
      records.size(), opts.workers, [&](std::size_t i) -> std::string {
        ManifestRecord& rec = records[i];
        if (rec.cloud_fraction && rec.coverage) return {};
        try {
          const Scene scene = read_scene(resolve(rec.image_path, base),
                                         resolve_opt(rec.validity_path, base));
          resolve_quality_metadata(rec, scene);
        } catch (const std::exception& e) {
          return e.what();
        }
        return {};
      });
  for (const std::string& err : resolve_errors) {
    if (!err.empty()) throw Error("metadata resolution failed: " + err);
  }

  const fs::path out_base = opts.out.parent_path();
  for (ManifestRecord& rec : records) {
    rebase_record(rec, base, base, out_base);
  }

  auto [pools, summary] = build_pool(records, opts.config);

  std::vector<ManifestRecord> kept;
  nlohmann::json empty_regions = nlohmann::json::array();
  for (const CandidatePool& pool : pools) {
    if (pool.candidates.empty()) empty_regions.push_back(pool.region_id);
    kept.insert(kept.end(), pool.candidates.begin(), pool.candidates.end());
  }

  const nlohmann::json config = {{"kappa", opts.config.kappa},
                                 {"omega", opts.config.omega},
                                 {"year", opts.config.year}};
  write_manifest(kept, opts.out, make_provenance("filter", config));

  nlohmann::json out = summary.to_json();
  out["regions_empty_ids"] = std::move(empty_regions);
  return out;
}

nlohmann::json run_select(const SelectOptions& opts) {
  opts.config.signature.validate();
  opts.config.matched_filter.validate();
  const fs::path in_base = opts.manifest.parent_path();
  const fs::path mask_in_base = opts.masks_dir.value_or(in_base);
  const fs::path base = opts.out.parent_path();

  std::vector<ManifestRecord> records = read_manifest(opts.manifest);
  for (ManifestRecord& rec : records) {
    rebase_record(rec, in_base, mask_in_base, base);
  }
  const std::vector<CandidatePool> pools = group_pools(records);

  if (opts.dump_detections) fs::create_directories(*opts.dump_detections);

  struct RegionOutcome {
    std::optional<SelectionResult> result;
    std::string region_id;
    std::string error;
  };

  const SceneLoader loader = [&](const ManifestRecord& rec) {
    Scene scene = read_scene(resolve(rec.image_path, base),
                             resolve_opt(rec.validity_path, base));
    scene.region_id = rec.region_id;
    scene.sensing_date = rec.sensing_date;
    return scene;
  };

  // Progress and failures stream to stderr as one JSON object per event;
  // the report itself stays deterministic.
  std::mutex log_mutex;
  std::atomic<std::size_t> done{0};
  const std::size_t progress_step = std::max<std::size_t>(pools.size() / 20, 256);

  const std::vector<RegionOutcome> outcomes = parallel_map<RegionOutcome>(
      pools.size(), opts.workers, [&](std::size_t i) {
        const CandidatePool& pool = pools[i];
        RegionOutcome outcome;
        outcome.region_id = pool.region_id;
        try {
          AnnualMask mask = read_annual_mask(resolve(pool.mask_path, base));
          mask.region_id = pool.region_id;

          DetectionSink sink = nullptr;
          if (opts.dump_detections) {
            sink = [&](const ManifestRecord& rec, const DetectionMap& map) {
              const std::string name = rec.region_id + "_" +
                                       rec.sensing_date.to_string() + "_" +
                                       to_string(map.method) + ".msr1";
              write_detection_map(map, *opts.dump_detections / name);
            };
          }
          outcome.result = select_best(pool, mask, opts.config, loader, sink);
        } catch (const std::exception& e) {
          outcome.error = e.what();
          const std::lock_guard<std::mutex> lock(log_mutex);
          std::cerr << nlohmann::json{{"event", "region_failed"},
                                      {"region_id", pool.region_id},
                                      {"error", outcome.error}}
                           .dump()
                    << '\n';
        }
        const std::size_t n = done.fetch_add(1) + 1;
        if (n % progress_step == 0 || n == pools.size()) {
          const std::lock_guard<std::mutex> lock(log_mutex);
          std::cerr << nlohmann::json{{"event", "progress"},
                                      {"stage", "select"},
                                      {"done", n},
                                      {"total", pools.size()}}
                           .dump()
                    << '\n';
        }
        return outcome;
      });

  std::vector<SelectionResult> results;
  nlohmann::json failures = nlohmann::json::array();
  for (const RegionOutcome& o : outcomes) {
    if (o.result) {
      results.push_back(*o.result);
    } else {
      failures.push_back(
          {{"region_id", o.region_id}, {"error", o.error}});
    }
  }

  nlohmann::json config = {
      {"method", to_string(opts.config.method)},
      {"k_pixels", opts.config.signature.k_pixels},
      {"structuring_element", opts.config.signature.structuring_element},
      {"seed_namespace", opts.config.signature.rng_seed_namespace},
      {"epsilon", opts.config.matched_filter.epsilon},
      {"boundary_exclusion_radius",
       opts.config.matched_filter.boundary_exclusion_radius},
      {"band_roles",
       {{"green", opts.config.roles.green_index},
        {"nir", opts.config.roles.nir_index},
        {"swir1", opts.config.roles.swir1_index}}}};

  const std::string report =
      rank_report(results, make_provenance("select", config));
  std::ofstream out(opts.out, std::ios::trunc);
  if (!out) throw IoError("cannot open " + opts.out.string() + " for writing");
  out << report;
  if (!out) throw IoError("write failed for " + opts.out.string());

  return nlohmann::json{{"regions", pools.size()},
                        {"selected", results.size()},
                        {"failed", failures.size()},
                        {"failures", std::move(failures)}};
}

namespace {

void rebase_dataset_records(std::vector<DatasetRecord>& records,
                            const fs::path& from_base, const fs::path& to_base) {
  for (DatasetRecord& r : records) {
    r.image_path = rebase_path(r.image_path, from_base, to_base);
    r.mask_path = rebase_path(r.mask_path, from_base, to_base);
    if (r.validity_path) {
      r.validity_path = rebase_path(*r.validity_path, from_base, to_base);
    }
  }
}

}  // namespace

nlohmann::json run_stratify(const StratifyOptions& opts) {
  opts.config.validate();
  std::vector<DatasetRecord> records = read_dataset_records(opts.in);
  rebase_dataset_records(records, opts.in.parent_path(),
                         opts.out.parent_path());

  std::vector<RegionMeta> metas;
  metas.reserve(records.size());
  for (const DatasetRecord& r : records) metas.push_back(r.meta());

  const RatioEnforcement enforcement = enforce_ratios(metas, opts.config);

  std::set<std::string> keep;
  for (const RegionMeta& m : enforcement.selected) keep.insert(m.region_id);

  std::vector<DatasetRecord> selected;
  for (const DatasetRecord& r : records) {
    if (keep.count(r.region_id)) selected.push_back(r);
  }
  std::sort(selected.begin(), selected.end(),
            [](const DatasetRecord& a, const DatasetRecord& b) {
              return a.region_id < b.region_id;
            });

  const nlohmann::json config = {
      {"strong_min", opts.config.strong_min},
      {"mid_min", opts.config.mid_min},
      {"positive_weights", opts.config.positive_weights},
      {"ratio_tolerance", opts.config.ratio_tolerance},
      {"seed", opts.config.seed}};
  write_dataset_records(selected, opts.out,
                        make_provenance("stratify", config));
  return enforcement.report_json();
}

nlohmann::json run_split(const SplitOptions& opts) {
  opts.config.validate();
  std::vector<DatasetRecord> records = read_dataset_records(opts.in);
  rebase_dataset_records(records, opts.in.parent_path(),
                         opts.out.parent_path());

  std::vector<RegionMeta> metas;
  metas.reserve(records.size());
  for (const DatasetRecord& r : records) metas.push_back(r.meta());

  const SplitOutcome outcome = country_disjoint_split(metas, opts.config);
  std::map<std::string, Split> by_region;
  for (const SplitAssignment& a : outcome.assignments) {
    by_region[a.region_id] = a.split;
  }
  for (DatasetRecord& r : records) r.split = by_region.at(r.region_id);
  std::sort(records.begin(), records.end(),
            [](const DatasetRecord& a, const DatasetRecord& b) {
              return a.region_id < b.region_id;
            });

  const nlohmann::json config = {{"fractions", opts.config.fractions},
                                 {"seed", opts.config.seed}};
  write_dataset_records(records, opts.out, make_provenance("split", config));
  return outcome.report_json();
}

nlohmann::json run_stats(const std::filesystem::path& in) {
  nlohmann::json summary = composition_stats(read_dataset_records(in));
  summary["provenance"] = make_provenance("stats", nlohmann::json::object());
  return summary;
}

nlohmann::json run_synth(const SynthOptions& opts) {
  const CorpusOutput out = generate_corpus(
      opts.spec, opts.out_dir, make_provenance("synth", opts.spec.to_json()));
  return nlohmann::json{{"manifest", out.manifest_path.string()},
                        {"truth", out.truth_path.string()},
                        {"regions", out.regions},
                        {"records", out.records}};
}

}  // namespace mango
