#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "mango/error.hpp"
#include "mango/matched_filter.hpp"
#include "mango/signature.hpp"
#include "test_support.hpp"

using namespace mango;
using test::make_mask;
using test::make_scene;

namespace {

AnnualMask no_mangrove(int n) {
  return make_mask(n, n, [](int, int) { return false; });
}

BackgroundStats identity_stats(int bands) {
  BackgroundStats st;
  st.mean = Spectrum::Zero(bands);
  st.covariance = Eigen::MatrixXd::Identity(bands, bands);
  st.sample_count = 100;
  st.cholesky.compute(st.covariance);
  return st;
}

// Independent two-pass estimator used as the oracle.
void oracle_moments(const std::vector<Spectrum>& xs, Spectrum& mean,
                    Eigen::MatrixXd& cov) {
  const int bands = static_cast<int>(xs.front().size());
  mean = Spectrum::Zero(bands);
  for (const Spectrum& x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  cov = Eigen::MatrixXd::Zero(bands, bands);
  for (const Spectrum& x : xs) {
    const Spectrum d = x - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(xs.size());
}

}  // namespace

TEST_CASE("background stats of a two-pixel one-band scene") {
  // values {0, 2}: population mean 1, population variance 1
  Scene s = make_scene(2, 1, 1, [](int, int c, int) { return 2.0 * c; });
  const AnnualMask mask = make_mask(2, 1, [](int, int) { return false; });

  const BackgroundStats st = background_stats(s, mask);
  CHECK(st.sample_count == 2);
  CHECK(st.mean[0] == 1.0);
  CHECK(st.covariance(0, 0) == doctest::Approx(1.0 * (1.0 + 1e-6)).epsilon(1e-12));
}

TEST_CASE("identical background pixels are degenerate") {
  const Scene s = make_scene(4, 4, 2, [](int, int, int) { return 0.5; });
  CHECK_THROWS_WITH_AS(background_stats(s, no_mangrove(4)),
                       doctest::Contains("degenerate background"),
                       DegenerateBackgroundError);
}

TEST_CASE("too few background pixels is an error") {
  Rng rng(17);
  Scene s = test::random_scene(rng, 3, 1, 3);  // 3 pixels, 3 bands: need 4
  CHECK_THROWS_AS(
      background_stats(s, make_mask(3, 1, [](int, int) { return false; })),
      InsufficientBackgroundError);
}

TEST_CASE("mangrove and invalid pixels are excluded from the background") {
  Rng rng(18);
  Scene s = test::random_scene(rng, 8, 8, 2);
  const AnnualMask mask = make_mask(8, 8, [](int r, int) { return r < 2; });
  s.valid[20] = 0;

  MatchedFilterConfig cfg;
  cfg.epsilon = 0.0;
  const BackgroundStats st = background_stats(s, mask, cfg);
  CHECK(st.sample_count == 64 - 16 - 1);

  std::vector<Spectrum> xs;
  for (int r = 2; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      if (r == 2 && c == 4) continue;  // the invalidated pixel
      xs.push_back(s.spectrum_at(r, c));
    }
  }
  Spectrum mean;
  Eigen::MatrixXd cov;
  oracle_moments(xs, mean, cov);
  for (int b = 0; b < 2; ++b) {
    CHECK(st.mean[b] == doctest::Approx(mean[b]).epsilon(1e-12));
  }
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(st.covariance(i, j) == doctest::Approx(cov(i, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("boundary exclusion removes a dilated collar from the background") {
  Scene s = make_scene(16, 16, 1, [](int r, int c, int) {
    return 0.1 * r + 0.01 * c;
  });
  const AnnualMask mask =
      make_mask(16, 16, [](int r, int c) { return r == 8 && c == 8; });

  MatchedFilterConfig cfg;
  cfg.boundary_exclusion_radius = 2;  // 5x5 dilation around the single pixel
  const BackgroundStats st = background_stats(s, mask, cfg);
  CHECK(st.sample_count == 256 - 25);
}

TEST_CASE("detect reduces to projection under identity covariance") {
  const BackgroundStats st = identity_stats(2);
  Spectrum target(2);
  target << 1.0, 0.0;

  Scene s = make_scene(2, 1, 2, [](int, int, int) { return 0.0; });
  s.at(0, 0, 0) = 2.0;  // x = (2, 0)
  // x = (0, 0) = mean at the second pixel

  const DetectionMap map = detect(s, st, target);
  CHECK(map.at(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(map.at(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("invalid pixels carry the undefined sentinel") {
  const BackgroundStats st = identity_stats(2);
  Spectrum target(2);
  target << 1.0, 1.0;
  Scene s = make_scene(3, 1, 2, [](int, int, int) { return 0.5; });
  s.valid[1] = 0;
  const DetectionMap map = detect(s, st, target);
  CHECK(map.is_defined(0, 0));
  CHECK_FALSE(map.is_defined(0, 1));
}

TEST_CASE("zero target spectrum is degenerate") {
  const BackgroundStats st = identity_stats(2);
  const Scene s = make_scene(2, 2, 2, [](int, int, int) { return 0.5; });
  CHECK_THROWS_WITH_AS(detect(s, st, Spectrum::Zero(2)),
                       doctest::Contains("degenerate signature"),
                       DegenerateSignatureError);
}

TEST_CASE("detect matches the explicit-inverse oracle") {
  Rng rng(6021);
  for (int trial = 0; trial < 10; ++trial) {
    const Scene s = test::random_scene(rng, 12, 12, 3);
    const AnnualMask mask =
        make_mask(12, 12, [&](int, int) { return rng.unit() < 0.2; });
    if (mask.true_count() == 0) continue;

    const BackgroundStats st = background_stats(s, mask);
    const BoolGrid eroded = erode(mask, 5);
    const ReferenceSet refs =
        sample_reference_pixels(eroded, mask, SignatureConfig{}, "oracle");
    const Spectrum target = target_spectrum(s, refs);
    const DetectionMap map = detect(s, st, target);

    const Eigen::MatrixXd inv = st.covariance.inverse();
    const double denom = std::sqrt(target.dot(inv * target));
    double worst = 0.0;
    for (int r = 0; r < 12; ++r) {
      for (int c = 0; c < 12; ++c) {
        const double want =
            target.dot(inv * (s.spectrum_at(r, c) - st.mean)) / denom;
        worst = std::max(worst, std::abs(map.at(r, c) - want));
      }
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("whitening: background scores have mean 0 and variance 1") {
  Rng rng(77);
  MatchedFilterConfig cfg;
  cfg.epsilon = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Scene s = test::random_scene(rng, 16, 16, 3);
    const AnnualMask mask =
        make_mask(16, 16, [](int r, int c) { return r < 3 && c < 4; });

    const BackgroundStats st = background_stats(s, mask, cfg);
    Spectrum target(3);
    target << 0.4, 0.2, 0.9;
    const DetectionMap map = detect(s, st, target);

    double sum = 0.0;
    std::size_t n = 0;
    for (int r = 0; r < 16; ++r) {
      for (int c = 0; c < 16; ++c) {
        if (mask.at(r, c)) continue;
        sum += map.at(r, c);
        ++n;
      }
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (int r = 0; r < 16; ++r) {
      for (int c = 0; c < 16; ++c) {
        if (mask.at(r, c)) continue;
        ss += (map.at(r, c) - mean) * (map.at(r, c) - mean);
      }
    }
    const double var = ss / static_cast<double>(n);
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(var - 1.0) < 1e-9);
  }

  SUBCASE("default ridge keeps variance within [1 - 1e-4, 1]") {
    const Scene s = test::random_scene(rng, 16, 16, 3);
    const AnnualMask mask = no_mangrove(16);
    const BackgroundStats st = background_stats(s, mask);  // epsilon 1e-6
    Spectrum target(3);
    target << 1.0, -0.5, 0.25;
    const DetectionMap map = detect(s, st, target);
    double sum = 0.0;
    for (double v : map.values) sum += v;
    const double mean = sum / static_cast<double>(map.values.size());
    double ss = 0.0;
    for (double v : map.values) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(map.values.size());
    CHECK(var <= 1.0 + 1e-12);
    CHECK(var >= 1.0 - 1e-4);
  }
}

TEST_CASE("global reflectance scaling leaves detection scores unchanged") {
  Rng rng(88);
  const Scene base = test::random_scene(rng, 10, 10, 3);
  const AnnualMask mask =
      make_mask(10, 10, [](int r, int c) { return r >= 4 && r <= 6 && c >= 4 && c <= 6; });
  const ReferenceSet refs = sample_reference_pixels(
      erode(mask, 3), mask, SignatureConfig{}, "scale");

  const auto run = [&](double c) {
    Scene scaled = base;
    for (double& v : scaled.pixels) v *= c;
    const BackgroundStats st = background_stats(scaled, mask);
    return detect(scaled, st, target_spectrum(scaled, refs));
  };

  const DetectionMap ref = run(1.0);
  for (double c : {1e-3, 1e3}) {
    const DetectionMap got = run(c);
    for (std::size_t i = 0; i < ref.values.size(); ++i) {
      CHECK(got.values[i] ==
            doctest::Approx(ref.values[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("scaling the target spectrum cancels out") {
  Rng rng(89);
  const Scene s = test::random_scene(rng, 8, 8, 2);
  const BackgroundStats st =
      background_stats(s, no_mangrove(8));
  Spectrum target(2);
  target << 0.3, 0.7;
  const DetectionMap a = detect(s, st, target);
  const DetectionMap b = detect(s, st, Spectrum(17.0 * target));
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    CHECK(b.values[i] == doctest::Approx(a.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("detection score is linear in the centered spectrum") {
  const BackgroundStats st = identity_stats(2);
  Spectrum target(2);
  target << 1.0, 2.0;

  Scene s1 = make_scene(1, 1, 2, [](int, int, int b) { return b == 0 ? 3.0 : -1.0; });
  Scene s2 = s1;
  for (double& v : s2.pixels) v *= 2.0;  // mean is zero: doubles (x - mean)

  const double d1 = detect(s1, st, target).at(0, 0);
  const double d2 = detect(s2, st, target).at(0, 0);
  CHECK(d2 == doctest::Approx(2.0 * d1).epsilon(1e-12));
}
