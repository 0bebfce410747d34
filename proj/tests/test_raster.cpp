#include <doctest.h>

#include <set>

#include "mango/error.hpp"
#include "mango/raster.hpp"
#include "test_support.hpp"

using namespace mango;
using test::all_valid;
using test::make_mask;

TEST_CASE("mangrove_fraction on trivial masks") {
  CHECK(mangrove_fraction(make_mask(256, 256, [](int, int) { return false; })) ==
        0.0);
  CHECK(mangrove_fraction(make_mask(256, 256, [](int, int) { return true; })) ==
        1.0);
}

TEST_CASE("mangrove_fraction equals direct count") {
  // 16x16 with 64 true pixels: 64/256 = 0.25
  const AnnualMask m =
      make_mask(16, 16, [](int r, int) { return r < 4; });  // 4 rows * 16 = 64
  CHECK(mangrove_fraction(m) == 0.25);
}

TEST_CASE("mangrove_fraction rejects empty rasters") {
  AnnualMask empty;
  CHECK_THROWS_AS(mangrove_fraction(empty), RasterError);
}

TEST_CASE("mangrove_fraction matches brute-force count on random masks") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const AnnualMask m =
        make_mask(23, 17, [&](int, int) { return rng.unit() < 0.3; });
    std::size_t count = 0;
    for (std::uint8_t v : m.grid) count += v != 0;
    const double f = mangrove_fraction(m);
    CHECK(f == static_cast<double>(count) / (23.0 * 17.0));
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
}

TEST_CASE("class_pixel_sets trivial cases") {
  const BoolGrid valid = all_valid(4, 4);

  auto [m0, b0] = class_pixel_sets(
      make_mask(4, 4, [](int, int) { return false; }), valid);
  CHECK(m0.empty());
  CHECK(b0.size() == 16);

  auto [m1, b1] = class_pixel_sets(
      make_mask(4, 4, [](int, int) { return true; }), valid);
  CHECK(m1.size() == 16);
  CHECK(b1.empty());
}

TEST_CASE("class_pixel_sets on a 2x2 checkerboard") {
  const AnnualMask m =
      make_mask(2, 2, [](int r, int c) { return (r + c) % 2 == 0; });
  auto [mangrove, background] = class_pixel_sets(m, all_valid(2, 2));
  REQUIRE(mangrove.size() == 2);
  REQUIRE(background.size() == 2);
  CHECK(mangrove[0] == PixelCoord{0, 0});
  CHECK(mangrove[1] == PixelCoord{1, 1});
  CHECK(background[0] == PixelCoord{0, 1});
  CHECK(background[1] == PixelCoord{1, 0});
}

TEST_CASE("class_pixel_sets rejects dimension mismatch") {
  CHECK_THROWS_AS(class_pixel_sets(
                      make_mask(4, 4, [](int, int) { return true; }),
                      all_valid(4, 5)),
                  RasterError);
}

TEST_CASE("class_pixel_sets partitions the valid pixels") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const AnnualMask mask =
        make_mask(13, 9, [&](int, int) { return rng.unit() < 0.4; });
    BoolGrid valid = all_valid(13, 9);
    for (auto& v : valid.grid) v = rng.unit() < 0.8 ? 1 : 0;

    auto [mangrove, background] = class_pixel_sets(mask, valid);
    CHECK(mangrove.size() + background.size() == valid.true_count());

    std::set<std::pair<int, int>> seen;
    for (const PixelCoord& p : mangrove) {
      CHECK(valid.at(p.row, p.col));
      CHECK(mask.at(p.row, p.col));
      seen.insert({p.row, p.col});
    }
    for (const PixelCoord& p : background) {
      CHECK(valid.at(p.row, p.col));
      CHECK_FALSE(mask.at(p.row, p.col));
      CHECK(seen.insert({p.row, p.col}).second);  // disjoint
    }
  }
}
