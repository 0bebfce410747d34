#include <doctest.h>

#include <algorithm>
#include <set>

#include "mango/error.hpp"
#include "mango/signature.hpp"
#include "test_support.hpp"

using namespace mango;
using test::make_mask;
using test::make_scene;

namespace {

// Independent erosion oracle: per-pixel neighborhood AND with zero padding.
BoolGrid erode_oracle(const AnnualMask& mask, int side) {
  const int radius = side / 2;
  BoolGrid out = BoolGrid::filled(mask.width, mask.height, false);
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      bool all = true;
      for (int dr = -radius; dr <= radius && all; ++dr) {
        for (int dc = -radius; dc <= radius && all; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || rr >= mask.height || cc < 0 || cc >= mask.width ||
              !mask.at(rr, cc)) {
            all = false;
          }
        }
      }
      out.set(r, c, all);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("erosion of a full 5x5 mask leaves only the center") {
  const AnnualMask m = make_mask(5, 5, [](int, int) { return true; });
  const BoolGrid e = erode(m, 5);
  CHECK(e.true_count() == 1);
  CHECK(e.at(2, 2));
}

TEST_CASE("erosion of an empty mask is empty") {
  const AnnualMask m = make_mask(8, 8, [](int, int) { return false; });
  CHECK(erode(m, 5).true_count() == 0);
}

TEST_CASE("erosion rejects even element sides") {
  const AnnualMask m = make_mask(4, 4, [](int, int) { return true; });
  CHECK_THROWS_AS(erode(m, 4), Error);
  CHECK_THROWS_AS(erode(m, 0), Error);
}

TEST_CASE("erosion matches the brute-force oracle on random masks") {
  Rng rng(5150);
  for (int trial = 0; trial < 30; ++trial) {
    const AnnualMask m =
        make_mask(32, 32, [&](int, int) { return rng.unit() < 0.6; });
    for (int side : {1, 3, 5, 7}) {
      const BoolGrid got = erode(m, side);
      const BoolGrid want = erode_oracle(m, side);
      REQUIRE(got.grid == want.grid);
    }
  }
}

TEST_CASE("erosion is anti-extensive and decreasing in element side") {
  Rng rng(61);
  const AnnualMask m =
      make_mask(24, 24, [&](int, int) { return rng.unit() < 0.7; });
  const BoolGrid e3 = erode(m, 3);
  const BoolGrid e5 = erode(m, 5);
  for (int r = 0; r < 24; ++r) {
    for (int c = 0; c < 24; ++c) {
      if (e5.at(r, c)) CHECK(e3.at(r, c));  // larger element erodes more
      if (e3.at(r, c)) CHECK(m.at(r, c));   // output inside input
    }
  }
}

TEST_CASE("dilation is the dual window-OR") {
  const AnnualMask m = make_mask(7, 7, [](int r, int c) {
    return r == 3 && c == 3;
  });
  const BoolGrid d = dilate(m, 3);
  CHECK(d.true_count() == 9);
  CHECK(d.at(2, 2));
  CHECK_FALSE(d.at(1, 1));
}

TEST_CASE("reference sampling uses the eroded set when it is large enough") {
  // 10 isolated survivors: a mask of full 5x5 blocks spaced apart.
  const AnnualMask m = make_mask(32, 32, [](int r, int c) {
    const int br = r / 6, bc = c / 6;
    return br < 2 && bc < 5 && r % 6 < 5 && c % 6 < 5;
  });
  const BoolGrid e = erode(m, 5);
  REQUIRE(e.true_count() == 10);

  SignatureConfig cfg;  // k = 10
  const ReferenceSet refs = sample_reference_pixels(e, m, cfg, "regionX");
  CHECK(refs.coords.size() == 10);
  CHECK(refs.provenance() == "eroded5x5");
  for (const PixelCoord& p : refs.coords) {
    CHECK(e.at(p.row, p.col));
  }
}

TEST_CASE("under-full eroded set is returned whole") {
  const AnnualMask m = make_mask(16, 16, [](int r, int c) {
    return r >= 2 && r <= 8 && c >= 2 && c <= 6;  // 7x5 block: 3x1 after 5x5
  });
  const BoolGrid e = erode(m, 5);
  REQUIRE(e.true_count() == 3);
  const ReferenceSet refs =
      sample_reference_pixels(e, m, SignatureConfig{}, "r");
  CHECK(refs.coords.size() == 3);
  CHECK(refs.provenance() == "eroded5x5");
}

TEST_CASE("thin fringe falls back down the erosion ladder") {
  // 1-pixel-wide diagonal fringe: empty at 5x5 and 3x3.
  const AnnualMask m = make_mask(32, 32, [](int r, int c) { return r == c; });
  REQUIRE(erode(m, 5).true_count() == 0);
  REQUIRE(erode(m, 3).true_count() == 0);

  const ReferenceSet refs =
      sample_reference_pixels(erode(m, 5), m, SignatureConfig{}, "fringe");
  CHECK(refs.provenance() == "raw_mask");
  CHECK(refs.coords.size() == 10);
  for (const PixelCoord& p : refs.coords) CHECK(m.at(p.row, p.col));
}

TEST_CASE("3x3 fallback engages when only the 5x5 erosion is empty") {
  // 3-pixel-wide band survives 3x3 but not 5x5.
  const AnnualMask m = make_mask(
      32, 32, [](int r, int) { return r >= 10 && r <= 12; });
  REQUIRE(erode(m, 5).true_count() == 0);
  REQUIRE(erode(m, 3).true_count() > 0);
  const ReferenceSet refs =
      sample_reference_pixels(erode(m, 5), m, SignatureConfig{}, "band");
  CHECK(refs.provenance() == "eroded3x3");
}

TEST_CASE("mask with no mangrove pixels raises the no-target error") {
  const AnnualMask m = make_mask(8, 8, [](int, int) { return false; });
  CHECK_THROWS_AS(
      sample_reference_pixels(erode(m, 5), m, SignatureConfig{}, "neg"),
      NoTargetClassError);
}

TEST_CASE("reference sampling is reproducible and region-keyed") {
  Rng rng(8);
  const AnnualMask m =
      make_mask(48, 48, [&](int, int) { return rng.unit() < 0.95; });
  const BoolGrid e = erode(m, 5);
  REQUIRE(e.true_count() > 10);

  const SignatureConfig cfg;
  const ReferenceSet a = sample_reference_pixels(e, m, cfg, "r-42");
  const ReferenceSet b = sample_reference_pixels(e, m, cfg, "r-42");
  CHECK(a.coords == b.coords);

  const ReferenceSet other = sample_reference_pixels(e, m, cfg, "r-43");
  CHECK(a.coords != other.coords);  // different region, different draw

  SignatureConfig other_ns = cfg;
  other_ns.rng_seed_namespace ^= 0xdeadbeef;
  const ReferenceSet c = sample_reference_pixels(e, m, other_ns, "r-42");
  CHECK(a.coords != c.coords);
}

TEST_CASE("target spectrum averages reference pixels per band") {
  SUBCASE("constant image") {
    const Scene s = make_scene(8, 8, 3, [](int, int, int) { return 0.7; });
    ReferenceSet refs;
    refs.coords = {{1, 1}, {2, 5}, {7, 0}};
    const Spectrum spec = target_spectrum(s, refs);
    for (int b = 0; b < 3; ++b) {
      CHECK(spec[b] == doctest::Approx(0.7).epsilon(1e-15));
    }
  }
  SUBCASE("two pixels, two bands") {
    Scene s = make_scene(2, 2, 2, [](int, int, int) { return 0.0; });
    s.at(0, 0, 0) = 1.0;
    s.at(0, 0, 1) = 2.0;
    s.at(1, 1, 0) = 3.0;
    s.at(1, 1, 1) = 4.0;
    ReferenceSet refs;
    refs.coords = {{0, 0}, {1, 1}};
    const Spectrum spec = target_spectrum(s, refs);
    CHECK(spec[0] == 2.0);
    CHECK(spec[1] == 3.0);
  }
}

TEST_CASE("target spectrum matches an independent summation oracle") {
  Rng rng(314);
  const Scene s = test::random_scene(rng, 16, 16, 4);
  ReferenceSet refs;
  std::set<std::pair<int, int>> used;
  while (refs.coords.size() < 10) {
    const int r = static_cast<int>(rng.bounded(16));
    const int c = static_cast<int>(rng.bounded(16));
    if (used.insert({r, c}).second) refs.coords.push_back({r, c});
  }
  const Spectrum spec = target_spectrum(s, refs);
  for (int b = 0; b < 4; ++b) {
    double sum = 0.0;
    for (const PixelCoord& p : refs.coords) sum += s.at(p.row, p.col, b);
    CHECK(spec[b] == doctest::Approx(sum / 10.0).epsilon(1e-14));
  }

  SUBCASE("permutation invariance") {
    ReferenceSet reversed;
    reversed.coords.assign(refs.coords.rbegin(), refs.coords.rend());
    const Spectrum spec2 = target_spectrum(s, reversed);
    for (int b = 0; b < 4; ++b) {
      CHECK(spec2[b] == doctest::Approx(spec[b]).epsilon(1e-12));
    }
  }
}

TEST_CASE("invalid reference pixels are dropped per candidate") {
  Scene s = make_scene(4, 4, 2, [](int r, int c, int) {
    return r == 0 && c == 0 ? 10.0 : 2.0;
  });
  ReferenceSet refs;
  refs.coords = {{0, 0}, {2, 2}};

  s.valid[0] = 0;  // (0,0) cloudy: only (2,2) remains
  const Spectrum spec = target_spectrum(s, refs);
  CHECK(spec[0] == 2.0);

  s.valid[2 * 4 + 2] = 0;  // all references gone
  CHECK_THROWS_WITH_AS(target_spectrum(s, refs),
                       doctest::Contains("signature unobservable"),
                       SignatureUnobservableError);
}
