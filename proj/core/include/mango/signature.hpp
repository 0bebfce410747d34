#pragma once

#include <string>
#include <vector>

#include "mango/raster.hpp"

namespace mango {

struct SignatureConfig {
  int k_pixels = 10;           // reference pixels per region
  int structuring_element = 5; // square erosion element side, odd
  std::uint64_t rng_seed_namespace = 0x6d616e67726f7665ULL;

  void validate() const;
};

/// High-purity mangrove reference coordinates for one region. erosion_side
/// records the fallback level that produced them: the element side that was
/// actually used, or 0 when erosion came up empty and raw mask pixels were
/// sampled instead.
struct ReferenceSet {
  std::vector<PixelCoord> coords;
  int erosion_side = 0;

  /// "eroded5x5" / "eroded3x3" / "raw_mask"
  std::string provenance() const;
};

/// Binary erosion with a side x side square element, zero-padded outside the
/// tile (border windows never survive). Throws Error on an even side.
BoolGrid erode(const AnnualMask& mask, int side);

/// Binary dilation with a side x side square element. Used for the optional
/// background boundary exclusion.
BoolGrid dilate(const AnnualMask& mask, int side);

/// Draws up to k_pixels reference coordinates from the eroded mask with a
/// PRNG seeded from (namespace, region_id), so every candidate date of a
/// region shares the same coordinates. Fallback ladder when erosion is
/// empty: re-erode with a 3x3 element, then sample the raw mask. Throws
/// NoTargetClassError when the mask has no mangrove pixels at all.
ReferenceSet sample_reference_pixels(const BoolGrid& eroded,
                                     const AnnualMask& mask,
                                     const SignatureConfig& cfg,
                                     const std::string& region_id);

/// Per-band mean spectrum over the reference coordinates. Reference pixels
/// invalid in this scene are dropped; if all are dropped, throws
/// SignatureUnobservableError.
Spectrum target_spectrum(const Scene& scene, const ReferenceSet& refs);

}  // namespace mango
