#pragma once

#include <filesystem>
#include <optional>

#include "mango/raster.hpp"

namespace mango {

// MSR1 tile file layout (little-endian):
//   bytes 0-3   magic "MSR1"
//   bytes 4-7   width  (u32)
//   bytes 8-11  height (u32)
//   bytes 12-15 bands  (u32)
//   byte  16    dtype  (1 = float32)
//   byte  17    layout (1 = band-sequential)
//   byte  18..  payload: band-sequential, row-major within band, float32
inline constexpr std::size_t kMsr1HeaderSize = 18;
inline constexpr std::uint8_t kMsr1DtypeFloat32 = 1;
inline constexpr std::uint8_t kMsr1LayoutBandSequential = 1;

struct TileFileHeader {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t bands = 0;
  std::uint8_t dtype = kMsr1DtypeFloat32;
  std::uint8_t layout = kMsr1LayoutBandSequential;
};

/// Reads and validates the 18-byte header. Throws IoError on bad magic,
/// unknown dtype/layout codes, degenerate dimensions, or size overflow.
TileFileHeader read_tile_header(const std::filesystem::path& path);

/// Loads a tile into a Scene. The optional validity file is a single-band
/// MSR1 tile with values {0.0, 1.0}; when absent every pixel is valid.
/// region_id and sensing_date are left empty (the manifest carries them).
Scene read_scene(const std::filesystem::path& image_path,
                 const std::optional<std::filesystem::path>& validity_path =
                     std::nullopt);

/// Writes a Scene as an MSR1 tile. read_scene inverts it bit-exactly for
/// float32-representable pixel values. Throws RasterError on an empty scene
/// or a non-finite value at a valid pixel, IoError on filesystem failure.
void write_scene(const Scene& scene, const std::filesystem::path& path);

/// Writes the scene's validity grid as a single-band {0,1} MSR1 tile.
void write_validity(const Scene& scene, const std::filesystem::path& path);

/// Annual masks travel as single-band {0,1} MSR1 tiles; any nonzero value
/// reads back as mangrove.
AnnualMask read_annual_mask(const std::filesystem::path& path);
void write_annual_mask(const AnnualMask& mask,
                       const std::filesystem::path& path);

/// Writes a detection map as a single-band MSR1 tile for visual audit.
/// Undefined pixels are stored as float32 NaN; no finiteness check applies.
void write_detection_map(const DetectionMap& map,
                         const std::filesystem::path& path);

}  // namespace mango
