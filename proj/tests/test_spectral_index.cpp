#include <doctest.h>

#include <cmath>

#include "mango/error.hpp"
#include "mango/spectral_index.hpp"
#include "test_support.hpp"

using namespace mango;
using test::make_scene;

namespace {

// 3-band scenes with roles green=0, nir=1, swir1=2.
constexpr BandRoles kRoles{0, 1, 2};

Scene pixel_scene(double green, double nir, double swir1) {
  Scene s = make_scene(1, 1, 3, [&](int, int, int b) {
    return b == 0 ? green : b == 1 ? nir : swir1;
  });
  return s;
}

}  // namespace

TEST_CASE("index evaluates the band-ratio formula") {
  const DetectionMap m = mvi_map(pixel_scene(0.1, 0.5, 0.3), kRoles);
  CHECK(m.method == DetectionMethod::Mvi);
  CHECK(m.at(0, 0) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("equal NIR and green gives zero") {
  const DetectionMap m = mvi_map(pixel_scene(0.2, 0.2, 0.6), kRoles);
  CHECK(m.at(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("singular denominator becomes the undefined sentinel") {
  const DetectionMap m = mvi_map(pixel_scene(0.3, 0.5, 0.3), kRoles);
  CHECK_FALSE(m.is_defined(0, 0));
}

TEST_CASE("invalid pixels stay undefined") {
  Scene s = pixel_scene(0.1, 0.5, 0.3);
  s.valid[0] = 0;
  CHECK_FALSE(mvi_map(s, kRoles).is_defined(0, 0));
}

TEST_CASE("defined pixels are a subset of valid pixels") {
  Rng rng(404);
  Scene s = test::random_scene(rng, 8, 8, 3);
  for (auto& v : s.valid) v = rng.unit() < 0.7 ? 1 : 0;
  const DetectionMap m = mvi_map(s, kRoles);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      if (m.is_defined(r, c)) CHECK(s.is_valid(r, c));
    }
  }
}

TEST_CASE("index is exactly invariant under global scaling") {
  Rng rng(405);
  const Scene base = test::random_scene(rng, 8, 8, 3);
  const DetectionMap ref = mvi_map(base, kRoles);
  for (double c : {1e-3, 1e3}) {
    Scene scaled = base;
    for (double& v : scaled.pixels) v *= c;
    const DetectionMap got = mvi_map(scaled, kRoles);
    for (std::size_t i = 0; i < ref.values.size(); ++i) {
      if (std::isnan(ref.values[i])) {
        CHECK(std::isnan(got.values[i]));
      } else {
        CHECK(got.values[i] ==
              doctest::Approx(ref.values[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("band roles are validated") {
  const Scene s = pixel_scene(0.1, 0.2, 0.3);
  CHECK_THROWS_AS(mvi_map(s, BandRoles{0, 0, 2}), Error);   // not distinct
  CHECK_THROWS_AS(mvi_map(s, BandRoles{0, 1, 3}), Error);   // out of range
  CHECK_THROWS_AS(mvi_map(s, BandRoles{-1, 1, 2}), Error);  // negative
}
