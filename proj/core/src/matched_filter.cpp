#include "mango/matched_filter.hpp"

#include <cmath>

#include "mango/error.hpp"
#include "mango/signature.hpp"

namespace mango {

void MatchedFilterConfig::validate() const {
  if (!(epsilon >= 0.0)) throw Error("epsilon must be >= 0");
  if (boundary_exclusion_radius < 0) {
    throw Error("boundary exclusion radius must be >= 0");
  }
}

BackgroundStats background_stats(const Scene& scene, const AnnualMask& mask,
                                 const MatchedFilterConfig& cfg) {
  cfg.validate();
  if (mask.width != scene.width || mask.height != scene.height) {
    throw RasterError("mask/scene dimension mismatch");
  }
  const int bands = scene.bands;

  BoolGrid excluded = BoolGrid::filled(scene.width, scene.height, false);
  if (cfg.boundary_exclusion_radius > 0) {
    excluded = dilate(mask, 2 * cfg.boundary_exclusion_radius + 1);
  }

  std::vector<PixelCoord> bg;
  for (int r = 0; r < scene.height; ++r) {
    for (int c = 0; c < scene.width; ++c) {
      if (!scene.is_valid(r, c)) continue;
      if (mask.at(r, c) || excluded.at(r, c)) continue;
      bg.push_back({r, c});
    }
  }
  const std::size_t n = bg.size();
  if (n <= static_cast<std::size_t>(bands)) {
    throw InsufficientBackgroundError(
        "insufficient background: " + std::to_string(n) + " pixels for " +
        std::to_string(bands) + " bands");
  }

  Eigen::MatrixXd samples(bands, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (int b = 0; b < bands; ++b) {
      samples(b, static_cast<Eigen::Index>(i)) = scene.at(bg[i].row, bg[i].col, b);
    }
  }

  BackgroundStats stats;
  stats.sample_count = n;
  stats.regularization_epsilon = cfg.epsilon;
  stats.mean = samples.rowwise().mean();
  const Eigen::MatrixXd centered = samples.colwise() - stats.mean;
  stats.covariance =
      (centered * centered.transpose()) / static_cast<double>(n);

  const double trace = stats.covariance.trace();
  if (trace <= 0.0) throw DegenerateBackgroundError("degenerate background");
  stats.covariance += cfg.epsilon * (trace / bands) *
                      Eigen::MatrixXd::Identity(bands, bands);

  stats.cholesky.compute(stats.covariance);
  if (stats.cholesky.info() != Eigen::Success) {
    throw DegenerateBackgroundError(
        "background covariance not positive definite");
  }
  return stats;
}

DetectionMap detect(const Scene& scene, const BackgroundStats& stats,
                    const Spectrum& target) {
  if (target.size() != scene.bands || stats.mean.size() != scene.bands) {
    throw RasterError("band count mismatch between scene, stats and target");
  }

  // One whitened steering vector per candidate; the per-pixel sweep is then
  // a dot product against centered spectra.
  const Eigen::VectorXd whitened = stats.cholesky.solve(target);
  const double norm2 = target.dot(whitened);
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw DegenerateSignatureError("degenerate signature");
  }
  const double inv_denom = 1.0 / std::sqrt(norm2);
  const double offset = whitened.dot(stats.mean);

  DetectionMap map;
  map.width = scene.width;
  map.height = scene.height;
  map.method = DetectionMethod::MatchedFilter;
  map.values.assign(scene.pixel_count(), DetectionMap::undefined());

  const std::size_t plane = scene.pixel_count();
  for (int r = 0; r < scene.height; ++r) {
    for (int c = 0; c < scene.width; ++c) {
      if (!scene.is_valid(r, c)) continue;
      const std::size_t base = static_cast<std::size_t>(r) * scene.width + c;
      double dot = 0.0;
      for (int b = 0; b < scene.bands; ++b) {
        dot += whitened[b] * scene.pixels[base + plane * b];
      }
      map.values[base] = (dot - offset) * inv_denom;
    }
  }
  return map;
}

}  // namespace mango
