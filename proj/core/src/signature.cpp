#include "mango/signature.hpp"

#include <algorithm>

#include "mango/error.hpp"
#include "mango/rng.hpp"

namespace mango {

namespace {

// Horizontal window-AND/OR via prefix counts, then the same pass vertically.
// Windows extending past the tile edge see padding: false for erosion
// (full-window AND fails), false for dilation (padding contributes nothing).

enum class WindowOp { AllTrue, AnyTrue };

BoolGrid window_pass_rows(const BoolGrid& in, int radius, WindowOp op) {
  BoolGrid out = BoolGrid::filled(in.width, in.height, false);
  std::vector<int> prefix(static_cast<std::size_t>(in.width) + 1);
  for (int r = 0; r < in.height; ++r) {
    prefix[0] = 0;
    for (int c = 0; c < in.width; ++c) {
      prefix[c + 1] = prefix[c] + (in.at(r, c) ? 1 : 0);
    }
    for (int c = 0; c < in.width; ++c) {
      const int lo = c - radius;
      const int hi = c + radius;
      if (op == WindowOp::AllTrue) {
        if (lo < 0 || hi >= in.width) continue;  // padding is false
        out.set(r, c, prefix[hi + 1] - prefix[lo] == hi - lo + 1);
      } else {
        const int clo = std::max(lo, 0);
        const int chi = std::min(hi, in.width - 1);
        out.set(r, c, prefix[chi + 1] - prefix[clo] > 0);
      }
    }
  }
  return out;
}

BoolGrid transpose(const BoolGrid& in) {
  BoolGrid out = BoolGrid::filled(in.height, in.width, false);
  for (int r = 0; r < in.height; ++r) {
    for (int c = 0; c < in.width; ++c) {
      out.set(c, r, in.at(r, c));
    }
  }
  return out;
}

BoolGrid morph_square(const BoolGrid& in, int side, WindowOp op) {
  if (side < 1 || side % 2 == 0) {
    throw Error("structuring element side must be odd and >= 1");
  }
  const int radius = side / 2;
  if (radius == 0) return in;
  BoolGrid h = window_pass_rows(in, radius, op);
  return transpose(window_pass_rows(transpose(h), radius, op));
}

BoolGrid mask_as_grid(const AnnualMask& mask) {
  return BoolGrid{mask.width, mask.height, mask.grid};
}

std::vector<PixelCoord> true_coords(const BoolGrid& g) {
  std::vector<PixelCoord> coords;
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      if (g.at(r, c)) coords.push_back({r, c});
    }
  }
  return coords;
}

}  // namespace

void SignatureConfig::validate() const {
  if (k_pixels < 1) throw Error("k_pixels must be >= 1");
  if (structuring_element < 1 || structuring_element % 2 == 0) {
    throw Error("structuring element side must be odd and >= 1");
  }
}

std::string ReferenceSet::provenance() const {
  if (erosion_side == 0) return "raw_mask";
  const std::string s = std::to_string(erosion_side);
  return "eroded" + s + "x" + s;
}

BoolGrid erode(const AnnualMask& mask, int side) {
  return morph_square(mask_as_grid(mask), side, WindowOp::AllTrue);
}

BoolGrid dilate(const AnnualMask& mask, int side) {
  return morph_square(mask_as_grid(mask), side, WindowOp::AnyTrue);
}

ReferenceSet sample_reference_pixels(const BoolGrid& eroded,
                                     const AnnualMask& mask,
                                     const SignatureConfig& cfg,
                                     const std::string& region_id) {
  cfg.validate();
  if (mask.true_count() == 0) throw NoTargetClassError("no target class");

  // Fallback ladder: configured element, then 3x3, then the raw mask. The
  // seed depends only on (namespace, region_id), so all rungs and all
  // candidate dates of a region draw from the same stream.
  std::vector<PixelCoord> coords = true_coords(eroded);
  int side_used = cfg.structuring_element;
  if (coords.empty() && cfg.structuring_element > 3) {
    coords = true_coords(erode(mask, 3));
    side_used = 3;
  }
  if (coords.empty()) {
    coords = true_coords(mask_as_grid(mask));
    side_used = 0;
  }

  ReferenceSet refs;
  refs.erosion_side = side_used;
  const std::size_t k = static_cast<std::size_t>(cfg.k_pixels);
  if (coords.size() <= k) {
    refs.coords = std::move(coords);
  } else {
    Rng rng(mix_seed(cfg.rng_seed_namespace, region_id));
    for (std::size_t i : rng.sample_indices(coords.size(), k)) {
      refs.coords.push_back(coords[i]);
    }
    std::sort(refs.coords.begin(), refs.coords.end(),
              [](const PixelCoord& a, const PixelCoord& b) {
                return a.row != b.row ? a.row < b.row : a.col < b.col;
              });
  }
  return refs;
}

Spectrum target_spectrum(const Scene& scene, const ReferenceSet& refs) {
  Spectrum sum = Spectrum::Zero(scene.bands);
  std::size_t used = 0;
  for (const PixelCoord& p : refs.coords) {
    if (!scene.is_valid(p.row, p.col)) continue;
    for (int b = 0; b < scene.bands; ++b) {
      sum[b] += scene.at(p.row, p.col, b);
    }
    ++used;
  }
  if (used == 0) throw SignatureUnobservableError("signature unobservable");
  return sum / static_cast<double>(used);
}

}  // namespace mango
