#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>

#include "mango/filter.hpp"
#include "mango/ranking.hpp"
#include "mango/stratify.hpp"
#include "mango/synth.hpp"

namespace mango {

/// Run-provenance header written as the first line of every output file:
/// {"provenance": {tool, version, command, config, config_hash, ...}}.
/// Holds only algorithmic parameters (thresholds, seeds, method), never
/// paths or worker counts, so reruns of the same configuration are
/// byte-identical wherever they execute.
nlohmann::json make_provenance(const std::string& command,
                               const nlohmann::json& config);

struct FilterOptions {
  std::filesystem::path manifest;
  std::filesystem::path out;
  FilterConfig config;
  int workers = 1;
};

/// Reads the manifest, fills in missing cloud/coverage metadata from the
/// validity grids, applies the pool predicate and writes the surviving
/// records (metadata resolved) as a new manifest. Returns the summary plus
/// the ids of regions whose pools came out empty.
nlohmann::json run_filter(const FilterOptions& opts);

struct SelectOptions {
  std::filesystem::path manifest;
  std::filesystem::path out;
  std::optional<std::filesystem::path> masks_dir;  // base for relative mask paths
  std::optional<std::filesystem::path> dump_detections;
  SelectConfig config;
  int workers = 1;
};

/// Scores every region of the (already filtered) manifest and writes the
/// selection report. Per-region failures are collected into the returned
/// summary, never abort the batch, and leave no report line.
nlohmann::json run_select(const SelectOptions& opts);

struct StratifyOptions {
  std::filesystem::path in;   // selection report
  std::filesystem::path out;  // balanced dataset records
  StratifyConfig config;
};

nlohmann::json run_stratify(const StratifyOptions& opts);

struct SplitOptions {
  std::filesystem::path in;   // stratified dataset records
  std::filesystem::path out;  // records with split assignments
  SplitConfig config;
};

nlohmann::json run_split(const SplitOptions& opts);

/// Composition summary of a dataset-record file.
nlohmann::json run_stats(const std::filesystem::path& in);

struct SynthOptions {
  std::filesystem::path out_dir;
  CorpusSpec spec;
};

nlohmann::json run_synth(const SynthOptions& opts);

}  // namespace mango
