#include "mango/spectral_index.hpp"

#include <cmath>

#include "mango/error.hpp"

namespace mango {

namespace {
constexpr double kDenominatorGuard = 1e-12;
}

void BandRoles::validate(int band_count) const {
  const bool in_range = green_index >= 0 && green_index < band_count &&
                        nir_index >= 0 && nir_index < band_count &&
                        swir1_index >= 0 && swir1_index < band_count;
  const bool distinct = green_index != nir_index &&
                        green_index != swir1_index &&
                        nir_index != swir1_index;
  if (!in_range || !distinct) {
    throw Error("band roles must be distinct and within the band count");
  }
}

DetectionMap mvi_map(const Scene& scene, const BandRoles& roles) {
  roles.validate(scene.bands);

  DetectionMap map;
  map.width = scene.width;
  map.height = scene.height;
  map.method = DetectionMethod::Mvi;
  map.values.assign(scene.pixel_count(), DetectionMap::undefined());

  const std::size_t plane = scene.pixel_count();
  const double* green = scene.pixels.data() + plane * roles.green_index;
  const double* nir = scene.pixels.data() + plane * roles.nir_index;
  const double* swir1 = scene.pixels.data() + plane * roles.swir1_index;

  for (std::size_t i = 0; i < plane; ++i) {
    if (scene.valid[i] == 0) continue;
    const double num = nir[i] - green[i];
    const double den = swir1[i] - green[i];
    // Guard scaled by the pixel's own magnitude so x -> c*x cancels exactly.
    const double guard =
        kDenominatorGuard * (std::abs(green[i]) + std::abs(nir[i]) + std::abs(swir1[i]));
    if (std::abs(den) < guard || den == 0.0) continue;  // undefined sentinel
    map.values[i] = num / (den + std::copysign(guard, den));
  }
  return map;
}

}  // namespace mango
