#include "mango/raster.hpp"

#include <algorithm>
#include <cmath>

#include "mango/error.hpp"

namespace mango {

namespace {

std::size_t count_nonzero(const std::vector<std::uint8_t>& g) {
  return static_cast<std::size_t>(
      std::count_if(g.begin(), g.end(), [](std::uint8_t v) { return v != 0; }));
}

}  // namespace

std::size_t AnnualMask::true_count() const { return count_nonzero(grid); }
std::size_t BoolGrid::true_count() const { return count_nonzero(grid); }

const char* to_string(DetectionMethod m) {
  return m == DetectionMethod::MatchedFilter ? "mf" : "mvi";
}

DetectionMethod detection_method_from_string(const std::string& s) {
  if (s == "mf") return DetectionMethod::MatchedFilter;
  if (s == "mvi") return DetectionMethod::Mvi;
  throw Error("unknown detection method '" + s + "'");
}

const char* to_string(Category c) {
  switch (c) {
    case Category::StrongPositive: return "strong_positive";
    case Category::MidPositive: return "mid_positive";
    case Category::WeakPositive: return "weak_positive";
    case Category::PureNegative: return "pure_negative";
  }
  return "?";
}

Category category_from_string(const std::string& s) {
  if (s == "strong_positive") return Category::StrongPositive;
  if (s == "mid_positive") return Category::MidPositive;
  if (s == "weak_positive") return Category::WeakPositive;
  if (s == "pure_negative") return Category::PureNegative;
  throw Error("unknown category '" + s + "'");
}

double mangrove_fraction(const AnnualMask& mask) {
  const std::size_t area = mask.pixel_count();
  if (area == 0) throw RasterError("empty raster");
  return static_cast<double>(mask.true_count()) / static_cast<double>(area);
}

std::pair<std::vector<PixelCoord>, std::vector<PixelCoord>> class_pixel_sets(
    const AnnualMask& mask, const BoolGrid& valid) {
  if (mask.width != valid.width || mask.height != valid.height) {
    throw RasterError("mask/validity dimension mismatch");
  }
  std::vector<PixelCoord> mangrove;
  std::vector<PixelCoord> background;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!valid.at(r, c)) continue;
      (mask.at(r, c) ? mangrove : background).push_back({r, c});
    }
  }
  return {std::move(mangrove), std::move(background)};
}

}  // namespace mango
