#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mango/date.hpp"

namespace mango {

/// Per-pixel spectral vector with one entry per band.
using Spectrum = Eigen::VectorXd;

struct PixelCoord {
  int row = 0;
  int col = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// One dated multispectral acquisition over a region tile. Pixels are stored
/// band-sequential (band-major, row-major within a band) in double precision;
/// the on-disk payload is float32 (see msr1.hpp). `valid` marks pixels that
/// were observed and cloud-free.
struct Scene {
  std::string region_id;
  Date sensing_date;
  int width = 0;
  int height = 0;
  int bands = 0;
  std::vector<double> pixels;   // size width*height*bands
  std::vector<std::uint8_t> valid;  // size width*height, 0 or 1

  double at(int row, int col, int band) const {
    return pixels[static_cast<std::size_t>(band) * height * width +
                  static_cast<std::size_t>(row) * width + col];
  }
  double& at(int row, int col, int band) {
    return pixels[static_cast<std::size_t>(band) * height * width +
                  static_cast<std::size_t>(row) * width + col];
  }
  bool is_valid(int row, int col) const {
    return valid[static_cast<std::size_t>(row) * width + col] != 0;
  }
  Spectrum spectrum_at(int row, int col) const {
    Spectrum s(bands);
    for (int b = 0; b < bands; ++b) s[b] = at(row, col, b);
    return s;
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
};

/// Binary label raster shared by all candidates of a region (true = mangrove).
struct AnnualMask {
  std::string region_id;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> grid;  // size width*height, 0 or 1

  bool at(int row, int col) const {
    return grid[static_cast<std::size_t>(row) * width + col] != 0;
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  std::size_t true_count() const;
};

/// Boolean grid used for validity masks and morphology results.
struct BoolGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> grid;

  static BoolGrid filled(int width, int height, bool value) {
    return BoolGrid{width, height,
                    std::vector<std::uint8_t>(
                        static_cast<std::size_t>(width) * height, value ? 1 : 0)};
  }
  bool at(int row, int col) const {
    return grid[static_cast<std::size_t>(row) * width + col] != 0;
  }
  void set(int row, int col, bool v) {
    grid[static_cast<std::size_t>(row) * width + col] = v ? 1 : 0;
  }
  std::size_t true_count() const;
};

enum class DetectionMethod { MatchedFilter, Mvi };

const char* to_string(DetectionMethod m);
DetectionMethod detection_method_from_string(const std::string& s);

/// Per-pixel real-valued detector response. Undefined pixels (invalid in the
/// scene, or singular index denominators) carry a NaN sentinel.
struct DetectionMap {
  int width = 0;
  int height = 0;
  DetectionMethod method = DetectionMethod::MatchedFilter;
  std::vector<double> values;  // size width*height, NaN = undefined

  static constexpr double undefined() {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * width + col];
  }
  void set(int row, int col, double v) {
    values[static_cast<std::size_t>(row) * width + col] = v;
  }
  bool is_defined(int row, int col) const {
    return !std::isnan(at(row, col));
  }
};

enum class Category { StrongPositive, MidPositive, WeakPositive, PureNegative };

const char* to_string(Category c);
Category category_from_string(const std::string& s);

/// Region-level metadata carried through stratification and splitting.
struct RegionMeta {
  std::string region_id;
  std::string country_iso3;
  double mangrove_fraction = 0.0;
  Category category = Category::PureNegative;
};

/// Fraction of mask pixels labeled mangrove, over the full tile area.
/// Throws RasterError on a zero-area mask.
double mangrove_fraction(const AnnualMask& mask);

/// Splits the valid pixels into (mangrove, background) coordinate lists:
/// mangrove = valid AND mask, background = valid AND NOT mask. Invalid pixels
/// belong to neither set. Throws RasterError on dimension mismatch.
std::pair<std::vector<PixelCoord>, std::vector<PixelCoord>> class_pixel_sets(
    const AnnualMask& mask, const BoolGrid& valid);

}  // namespace mango
