#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mango/raster.hpp"

namespace mango {

enum class MaskGeometry { Blob, Fringe, Empty };

/// Ground-truthable single-region fixture: Gaussian background with a known
/// covariance, mangrove pixels displaced along a fixed direction by a
/// per-date separability (in whitened sigma units), and scheduled cloud
/// invalidation. The date with the largest separability is the planted
/// optimum.
struct SynthSpec {
  int tile_size = 32;
  int bands = 4;
  Eigen::VectorXd background_mean;       // defaulted when empty
  Eigen::MatrixXd background_covariance; // defaulted when empty; must be PD
  Eigen::VectorXd displacement;          // whitened-space direction, defaulted
  std::vector<double> separability;      // one entry per date, sigma units
  std::vector<double> cloud_schedule;    // one entry per date, in [0,1)
  MaskGeometry geometry = MaskGeometry::Blob;
  double blob_fraction = 0.15;
  bool heavy_tail = false;  // contaminate draws to probe robustness
  std::uint64_t seed = 0;
  int year = 2020;

  void validate() const;
};

struct SynthRegion {
  AnnualMask mask;
  std::vector<Scene> scenes;     // ascending dates, one per schedule entry
  std::size_t planted_best = 0;  // index of the max-separability date
};

/// Deterministic under (spec.seed, region_id): two runs produce bit-identical
/// scenes. Throws Error on an invalid spec.
SynthRegion generate_region(const SynthSpec& spec, const std::string& region_id);

/// Multi-region corpus written as MSR1 tiles plus a manifest, used by the
/// end-to-end pipeline tests and the `synth` subcommand. Also emits
/// truth.jsonl recording each region's planted date.
struct CorpusSpec {
  int regions = 24;
  int countries = 6;
  int tile_size = 32;
  int bands = 4;
  int dates = 4;
  double separability_high = 6.0;
  double separability_low = 0.5;
  double cloud_max = 0.04;
  double negative_share = 0.25;  // regions with an empty mask
  double fringe_share = 0.10;    // regions with a 1-pixel fringe mask
  std::uint64_t seed = 0;
  int year = 2020;

  void validate() const;
  nlohmann::json to_json() const;
  static CorpusSpec from_json(const nlohmann::json& j);
};

struct CorpusOutput {
  std::filesystem::path manifest_path;
  std::filesystem::path truth_path;
  std::size_t regions = 0;
  std::size_t records = 0;
};

CorpusOutput generate_corpus(
    const CorpusSpec& spec, const std::filesystem::path& out_dir,
    const std::optional<nlohmann::json>& manifest_header = std::nullopt);

}  // namespace mango
