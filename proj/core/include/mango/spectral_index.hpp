#pragma once

#include "mango/raster.hpp"

namespace mango {

/// Stack positions of the bands the vegetation index reads. Defaults match
/// a 13-band Sentinel-2 L2A ordering (green=B3, nir=B8, swir1=B11).
struct BandRoles {
  int green_index = 2;
  int nir_index = 7;
  int swir1_index = 10;

  void validate(int band_count) const;
};

/// Mangrove Vegetation Index response map:
///   MVI = (NIR - Green) / (SWIR1 - Green)
/// The denominator is guarded by a relative epsilon scaled with the pixel's
/// band magnitudes, which keeps the map exactly invariant under global
/// reflectance scaling. Pixels with a singular denominator (and invalid
/// pixels) carry the NaN sentinel and are excluded from class statistics.
DetectionMap mvi_map(const Scene& scene, const BandRoles& roles);

}  // namespace mango
