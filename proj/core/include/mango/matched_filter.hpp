#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mango/raster.hpp"

namespace mango {

struct MatchedFilterConfig {
  // Relative-trace ridge: cov += epsilon * (trace/B) * I. Relative (rather
  // than absolute) so that scaling every reflectance by c scales the ridge
  // by c^2 and detection scores are unchanged.
  double epsilon = 1e-6;
  // Exclude background pixels within this many pixels of the mask boundary
  // (square dilation radius). 0 keeps all valid non-mangrove pixels.
  int boundary_exclusion_radius = 0;

  void validate() const;
};

/// Background mean/covariance estimated from valid non-mangrove pixels.
/// Covariance uses population (1/N) normalization and is positive definite
/// after regularization (the stored factorization is the proof).
struct BackgroundStats {
  Spectrum mean;
  Eigen::MatrixXd covariance;
  std::size_t sample_count = 0;
  double regularization_epsilon = 0.0;
  Eigen::LLT<Eigen::MatrixXd> cholesky;
};

/// Estimates background statistics for one candidate scene. Throws
/// InsufficientBackgroundError when fewer than B+1 valid background pixels
/// exist, DegenerateBackgroundError on an all-constant background or a
/// covariance that fails factorization after regularization.
BackgroundStats background_stats(const Scene& scene, const AnnualMask& mask,
                                 const MatchedFilterConfig& cfg = {});

/// Background-whitened match score per valid pixel:
///   D(x) = s^T cov^-1 (x - mean) / sqrt(s^T cov^-1 s),
/// computed by solving against the stored factorization, never by forming
/// an explicit inverse. Invalid pixels get the NaN sentinel. Throws
/// DegenerateSignatureError when the whitened norm of s is not positive.
DetectionMap detect(const Scene& scene, const BackgroundStats& stats,
                    const Spectrum& target);

}  // namespace mango
