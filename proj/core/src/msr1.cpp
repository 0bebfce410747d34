#include "mango/msr1.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "mango/error.hpp"

namespace mango {

namespace {

constexpr char kMagic[4] = {'M', 'S', 'R', '1'};

static_assert(std::endian::native == std::endian::little,
              "MSR1 I/O assumes a little-endian host");
static_assert(sizeof(float) == 4);

void put_u32(std::uint8_t* dst, std::uint32_t v) {
  dst[0] = static_cast<std::uint8_t>(v);
  dst[1] = static_cast<std::uint8_t>(v >> 8);
  dst[2] = static_cast<std::uint8_t>(v >> 16);
  dst[3] = static_cast<std::uint8_t>(v >> 24);
}

std::uint32_t get_u32(const std::uint8_t* src) {
  return static_cast<std::uint32_t>(src[0]) |
         static_cast<std::uint32_t>(src[1]) << 8 |
         static_cast<std::uint32_t>(src[2]) << 16 |
         static_cast<std::uint32_t>(src[3]) << 24;
}

TileFileHeader parse_header(const std::uint8_t* buf,
                            const std::filesystem::path& path) {
  if (std::memcmp(buf, kMagic, 4) != 0) {
    throw IoError("bad magic in " + path.string());
  }
  TileFileHeader h;
  h.width = get_u32(buf + 4);
  h.height = get_u32(buf + 8);
  h.bands = get_u32(buf + 12);
  h.dtype = buf[16];
  h.layout = buf[17];
  if (h.width == 0 || h.height == 0 || h.bands == 0) {
    throw IoError("degenerate dimensions in " + path.string());
  }
  if (h.dtype != kMsr1DtypeFloat32) {
    throw IoError("unrecognized dtype code in " + path.string());
  }
  if (h.layout != kMsr1LayoutBandSequential) {
    throw IoError("unrecognized layout code in " + path.string());
  }
  // Bounds first so the size product below cannot wrap (2^20*2^20*2^16
  // stays within 64 bits).
  if (h.width > (1u << 20) || h.height > (1u << 20) || h.bands > (1u << 16)) {
    throw IoError("dimension overflow in " + path.string());
  }
  const std::uint64_t n = std::uint64_t{h.width} * h.height * h.bands;
  if (n > std::numeric_limits<std::size_t>::max() / sizeof(float)) {
    throw IoError("dimension overflow in " + path.string());
  }
  return h;
}

std::vector<float> read_payload(std::ifstream& in, const TileFileHeader& h,
                                const std::filesystem::path& path) {
  const std::size_t n = std::size_t{h.width} * h.height * h.bands;
  std::vector<float> data(n);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != n * sizeof(float)) {
    throw IoError("truncated payload in " + path.string());
  }
  return data;
}

void write_tile(const std::filesystem::path& path, std::uint32_t width,
                std::uint32_t height, std::uint32_t bands,
                const std::vector<float>& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  std::uint8_t header[kMsr1HeaderSize];
  std::memcpy(header, kMagic, 4);
  put_u32(header + 4, width);
  put_u32(header + 8, height);
  put_u32(header + 12, bands);
  header[16] = kMsr1DtypeFloat32;
  header[17] = kMsr1LayoutBandSequential;
  out.write(reinterpret_cast<const char*>(header), kMsr1HeaderSize);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

TileFileHeader read_tile_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::uint8_t buf[kMsr1HeaderSize];
  in.read(reinterpret_cast<char*>(buf), kMsr1HeaderSize);
  if (static_cast<std::size_t>(in.gcount()) != kMsr1HeaderSize) {
    throw IoError("truncated header in " + path.string());
  }
  return parse_header(buf, path);
}

Scene read_scene(const std::filesystem::path& image_path,
                 const std::optional<std::filesystem::path>& validity_path) {
  std::ifstream in(image_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + image_path.string());
  std::uint8_t buf[kMsr1HeaderSize];
  in.read(reinterpret_cast<char*>(buf), kMsr1HeaderSize);
  if (static_cast<std::size_t>(in.gcount()) != kMsr1HeaderSize) {
    throw IoError("truncated header in " + image_path.string());
  }
  const TileFileHeader h = parse_header(buf, image_path);
  const std::vector<float> payload = read_payload(in, h, image_path);

  Scene scene;
  scene.width = static_cast<int>(h.width);
  scene.height = static_cast<int>(h.height);
  scene.bands = static_cast<int>(h.bands);
  scene.pixels.assign(payload.begin(), payload.end());
  scene.valid.assign(scene.pixel_count(), 1);

  if (validity_path) {
    std::ifstream vin(*validity_path, std::ios::binary);
    if (!vin) throw IoError("cannot open " + validity_path->string());
    std::uint8_t vbuf[kMsr1HeaderSize];
    vin.read(reinterpret_cast<char*>(vbuf), kMsr1HeaderSize);
    if (static_cast<std::size_t>(vin.gcount()) != kMsr1HeaderSize) {
      throw IoError("truncated header in " + validity_path->string());
    }
    const TileFileHeader vh = parse_header(vbuf, *validity_path);
    if (vh.width != h.width || vh.height != h.height || vh.bands != 1) {
      throw IoError("validity grid shape mismatch for " +
                    validity_path->string());
    }
    const std::vector<float> vdata = read_payload(vin, vh, *validity_path);
    for (std::size_t i = 0; i < vdata.size(); ++i) {
      scene.valid[i] = vdata[i] != 0.0f ? 1 : 0;
    }
  }
  return scene;
}

void write_scene(const Scene& scene, const std::filesystem::path& path) {
  if (scene.width <= 0 || scene.height <= 0 || scene.bands <= 0 ||
      scene.pixels.empty()) {
    throw RasterError("empty scene");
  }
  if (scene.pixels.size() !=
      scene.pixel_count() * static_cast<std::size_t>(scene.bands)) {
    throw RasterError("scene pixel buffer size mismatch");
  }
  std::vector<float> payload(scene.pixels.size());
  const std::size_t plane = scene.pixel_count();
  for (std::size_t i = 0; i < scene.pixels.size(); ++i) {
    const double v = scene.pixels[i];
    if (!std::isfinite(v) && scene.valid[i % plane] != 0) {
      throw RasterError("non-finite reflectance");
    }
    payload[i] = static_cast<float>(v);
  }
  write_tile(path, static_cast<std::uint32_t>(scene.width),
             static_cast<std::uint32_t>(scene.height),
             static_cast<std::uint32_t>(scene.bands), payload);
}

void write_validity(const Scene& scene, const std::filesystem::path& path) {
  std::vector<float> payload(scene.valid.size());
  for (std::size_t i = 0; i < scene.valid.size(); ++i) {
    payload[i] = scene.valid[i] ? 1.0f : 0.0f;
  }
  write_tile(path, static_cast<std::uint32_t>(scene.width),
             static_cast<std::uint32_t>(scene.height), 1, payload);
}

AnnualMask read_annual_mask(const std::filesystem::path& path) {
  const Scene s = read_scene(path);
  if (s.bands != 1) {
    throw IoError("annual mask must be single-band: " + path.string());
  }
  AnnualMask mask;
  mask.width = s.width;
  mask.height = s.height;
  mask.grid.resize(s.pixel_count());
  for (std::size_t i = 0; i < mask.grid.size(); ++i) {
    mask.grid[i] = s.pixels[i] != 0.0 ? 1 : 0;
  }
  return mask;
}

void write_annual_mask(const AnnualMask& mask,
                       const std::filesystem::path& path) {
  std::vector<float> payload(mask.grid.size());
  for (std::size_t i = 0; i < mask.grid.size(); ++i) {
    payload[i] = mask.grid[i] ? 1.0f : 0.0f;
  }
  write_tile(path, static_cast<std::uint32_t>(mask.width),
             static_cast<std::uint32_t>(mask.height), 1, payload);
}

void write_detection_map(const DetectionMap& map,
                         const std::filesystem::path& path) {
  std::vector<float> payload(map.values.size());
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    payload[i] = static_cast<float>(map.values[i]);
  }
  write_tile(path, static_cast<std::uint32_t>(map.width),
             static_cast<std::uint32_t>(map.height), 1, payload);
}

}  // namespace mango
