#include "mango/synth.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "mango/error.hpp"
#include "mango/manifest.hpp"
#include "mango/msr1.hpp"
#include "mango/rng.hpp"

namespace mango {

namespace {

Eigen::VectorXd default_mean(int bands) {
  Eigen::VectorXd m(bands);
  for (int b = 0; b < bands; ++b) m[b] = 0.10 + 0.02 * b;
  return m;
}

// Exponentially correlated covariance; positive definite for |rho| < 1.
Eigen::MatrixXd default_covariance(int bands) {
  Eigen::MatrixXd cov(bands, bands);
  for (int i = 0; i < bands; ++i) {
    for (int j = 0; j < bands; ++j) {
      cov(i, j) = 2e-3 * std::pow(0.5, std::abs(i - j));
    }
  }
  return cov;
}

Eigen::VectorXd default_displacement(int bands) {
  Eigen::VectorXd d(bands);
  for (int b = 0; b < bands; ++b) d[b] = b % 2 == 0 ? 1.0 : -1.0;
  return d;
}

Date nth_date(int year, std::size_t index) {
  // Dates spaced 11 days apart starting Jan 5; fits 33 dates in a year.
  static const int month_days[12] = {31, 28, 31, 30, 31, 30,
                                     31, 31, 30, 31, 30, 31};
  int doy = 5 + static_cast<int>(index) * 11;
  int month = 1;
  for (int m = 0; m < 12 && doy > month_days[m]; ++m) {
    doy -= month_days[m];
    ++month;
  }
  return Date{year, month, doy};
}

AnnualMask make_mask(const SynthSpec& spec, const std::string& region_id) {
  AnnualMask mask;
  mask.region_id = region_id;
  mask.width = spec.tile_size;
  mask.height = spec.tile_size;
  mask.grid.assign(static_cast<std::size_t>(spec.tile_size) * spec.tile_size, 0);
  switch (spec.geometry) {
    case MaskGeometry::Empty:
      break;
    case MaskGeometry::Fringe: {
      const int row = spec.tile_size / 2;
      for (int c = 0; c < spec.tile_size; ++c) {
        mask.grid[static_cast<std::size_t>(row) * spec.tile_size + c] = 1;
      }
      break;
    }
    case MaskGeometry::Blob: {
      const double area = spec.blob_fraction * spec.tile_size * spec.tile_size;
      const double radius = std::sqrt(area / std::numbers::pi);
      const double cy = spec.tile_size / 2.0 - 0.5;
      const double cx = spec.tile_size / 2.0 - 0.5;
      for (int r = 0; r < spec.tile_size; ++r) {
        for (int c = 0; c < spec.tile_size; ++c) {
          const double dy = r - cy;
          const double dx = c - cx;
          if (dy * dy + dx * dx <= radius * radius) {
            mask.grid[static_cast<std::size_t>(r) * spec.tile_size + c] = 1;
          }
        }
      }
      break;
    }
  }
  return mask;
}

}  // namespace

void SynthSpec::validate() const {
  if (tile_size < 1 || bands < 1) throw Error("degenerate synth dimensions");
  if (separability.empty()) throw Error("empty separability schedule");
  if (cloud_schedule.size() != separability.size()) {
    throw Error("cloud schedule length must match separability schedule");
  }
  for (double c : cloud_schedule) {
    if (!(c >= 0.0 && c < 1.0)) throw Error("cloud fraction outside [0,1)");
  }
  if (separability.size() > 33) throw Error("schedule exceeds one year of dates");
  if (!(blob_fraction > 0.0 && blob_fraction <= 1.0) &&
      geometry == MaskGeometry::Blob) {
    throw Error("blob_fraction outside (0,1]");
  }
}

SynthRegion generate_region(const SynthSpec& spec,
                            const std::string& region_id) {
  spec.validate();
  const int n = spec.tile_size;
  const int bands = spec.bands;

  const Eigen::VectorXd mean =
      spec.background_mean.size() > 0 ? spec.background_mean
                                      : default_mean(bands);
  const Eigen::MatrixXd cov = spec.background_covariance.size() > 0
                                  ? spec.background_covariance
                                  : default_covariance(bands);
  if (mean.size() != bands || cov.rows() != bands || cov.cols() != bands) {
    throw Error("mean/covariance size does not match band count");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error("background covariance not positive definite");
  }
  const Eigen::MatrixXd chol = llt.matrixL();

  Eigen::VectorXd direction = spec.displacement.size() > 0
                                  ? spec.displacement
                                  : default_displacement(bands);
  if (direction.size() != bands || direction.norm() == 0.0) {
    throw Error("bad displacement direction");
  }
  direction.normalize();
  // Unit step in whitened space: a shift of k * step has Mahalanobis
  // distance k with respect to the background covariance.
  const Eigen::VectorXd step = chol * direction;

  SynthRegion region;
  region.mask = make_mask(spec, region_id);
  region.planted_best = static_cast<std::size_t>(
      std::max_element(spec.separability.begin(), spec.separability.end()) -
      spec.separability.begin());

  const std::size_t plane = static_cast<std::size_t>(n) * n;
  for (std::size_t t = 0; t < spec.separability.size(); ++t) {
    Rng rng(splitmix64(mix_seed(spec.seed, region_id) + t));
    Scene scene;
    scene.region_id = region_id;
    scene.sensing_date = nth_date(spec.year, t);
    scene.width = n;
    scene.height = n;
    scene.bands = bands;
    scene.pixels.resize(plane * bands);
    scene.valid.assign(plane, 1);

    Eigen::VectorXd z(bands);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        for (int b = 0; b < bands; ++b) z[b] = rng.gaussian();
        if (spec.heavy_tail && rng.unit() < 0.05) z *= 4.0;
        Eigen::VectorXd x = mean + chol * z;
        if (region.mask.at(r, c)) x += spec.separability[t] * step;
        const std::size_t base = static_cast<std::size_t>(r) * n + c;
        for (int b = 0; b < bands; ++b) {
          // Values are squeezed through float32 so that written tiles read
          // back bit-identical to the in-memory fixture.
          scene.pixels[base + plane * b] = static_cast<float>(x[b]);
        }
      }
    }

    const auto cloud_pixels = static_cast<std::size_t>(
        spec.cloud_schedule[t] * static_cast<double>(plane));
    for (std::size_t i : rng.sample_indices(plane, cloud_pixels)) {
      scene.valid[i] = 0;
    }
    region.scenes.push_back(std::move(scene));
  }
  return region;
}

void CorpusSpec::validate() const {
  if (regions < 1 || countries < 3 || tile_size < 8 || bands < 3 || dates < 1) {
    throw Error("corpus spec out of range");
  }
  if (dates > 33) throw Error("too many dates for one year");
  if (!(cloud_max >= 0.0 && cloud_max < 1.0)) throw Error("bad cloud_max");
  if (!(negative_share >= 0.0 && fringe_share >= 0.0 &&
        negative_share + fringe_share <= 1.0)) {
    throw Error("bad geometry shares");
  }
}

nlohmann::json CorpusSpec::to_json() const {
  return nlohmann::json{
      {"regions", regions},
      {"countries", countries},
      {"tile_size", tile_size},
      {"bands", bands},
      {"dates", dates},
      {"separability_high", separability_high},
      {"separability_low", separability_low},
      {"cloud_max", cloud_max},
      {"negative_share", negative_share},
      {"fringe_share", fringe_share},
      {"seed", seed},
      {"year", year}};
}

CorpusSpec CorpusSpec::from_json(const nlohmann::json& j) {
  CorpusSpec s;
  s.regions = j.value("regions", s.regions);
  s.countries = j.value("countries", s.countries);
  s.tile_size = j.value("tile_size", s.tile_size);
  s.bands = j.value("bands", s.bands);
  s.dates = j.value("dates", s.dates);
  s.separability_high = j.value("separability_high", s.separability_high);
  s.separability_low = j.value("separability_low", s.separability_low);
  s.cloud_max = j.value("cloud_max", s.cloud_max);
  s.negative_share = j.value("negative_share", s.negative_share);
  s.fringe_share = j.value("fringe_share", s.fringe_share);
  s.seed = j.value("seed", s.seed);
  s.year = j.value("year", s.year);
  s.validate();
  return s;
}

CorpusOutput generate_corpus(
    const CorpusSpec& spec, const std::filesystem::path& out_dir,
    const std::optional<nlohmann::json>& manifest_header) {
  spec.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "tiles");
  fs::create_directories(out_dir / "masks");
  fs::create_directories(out_dir / "valid");

  const auto n_negative =
      static_cast<int>(std::lround(spec.negative_share * spec.regions));
  const auto n_fringe =
      static_cast<int>(std::lround(spec.fringe_share * spec.regions));

  std::vector<ManifestRecord> manifest;
  std::ofstream truth(out_dir / "truth.jsonl", std::ios::trunc);
  if (!truth) throw IoError("cannot write truth.jsonl");

  for (int i = 0; i < spec.regions; ++i) {
    char region_id[16];
    std::snprintf(region_id, sizeof(region_id), "r%05d", i);
    char country[16];
    std::snprintf(country, sizeof(country), "A%02d", i % spec.countries);

    Rng meta_rng(splitmix64(spec.seed ^ fnv1a64(region_id)));

    SynthSpec rs;
    rs.tile_size = spec.tile_size;
    rs.bands = spec.bands;
    rs.seed = spec.seed;
    rs.year = spec.year;
    // Spread geometries across the round-robin country assignment so every
    // country sees all categories.
    if (i < n_negative) {
      rs.geometry = MaskGeometry::Empty;
    } else if (i < n_negative + n_fringe) {
      rs.geometry = MaskGeometry::Fringe;
    } else {
      rs.geometry = MaskGeometry::Blob;
      rs.blob_fraction = 0.02 + 0.38 * meta_rng.unit();
    }
    const auto planted = static_cast<std::size_t>(
        meta_rng.bounded(static_cast<std::uint64_t>(spec.dates)));
    for (int t = 0; t < spec.dates; ++t) {
      rs.separability.push_back(static_cast<std::size_t>(t) == planted
                                    ? spec.separability_high
                                    : spec.separability_low);
      rs.cloud_schedule.push_back(spec.cloud_max * meta_rng.unit());
    }

    SynthRegion region = generate_region(rs, region_id);

    const fs::path mask_path = out_dir / "masks" / (std::string(region_id) + ".msr1");
    write_annual_mask(region.mask, mask_path);

    for (Scene& scene : region.scenes) {
      const std::string stem =
          std::string(region_id) + "_" + scene.sensing_date.to_string();
      const fs::path image_path = out_dir / "tiles" / (stem + ".msr1");
      write_scene(scene, image_path);

      ManifestRecord rec;
      rec.region_id = region_id;
      rec.country_iso3 = country;
      rec.sensing_date = scene.sensing_date;
      rec.image_path = fs::path("tiles") / (stem + ".msr1");
      rec.mask_path = fs::path("masks") / (std::string(region_id) + ".msr1");
      const std::size_t invalid =
          scene.pixel_count() - BoolGrid{scene.width, scene.height, scene.valid}
                                    .true_count();
      rec.cloud_fraction =
          static_cast<double>(invalid) / static_cast<double>(scene.pixel_count());
      rec.coverage = 1.0;
      if (invalid > 0) {
        const fs::path validity_path = out_dir / "valid" / (stem + ".msr1");
        write_validity(scene, validity_path);
        rec.validity_path = fs::path("valid") / (stem + ".msr1");
      }
      manifest.push_back(std::move(rec));
    }

    // Decoy records exercising the pool filter: an off-year acquisition for
    // every third region, an over-cloudy one for every fifth.
    if (i % 3 == 0) {
      SynthSpec off = rs;
      off.year = spec.year - 1;
      off.separability.assign(1, spec.separability_low);
      off.cloud_schedule.assign(1, 0.0);
      off.seed = splitmix64(spec.seed + 1);
      SynthRegion extra = generate_region(off, region_id);
      Scene& scene = extra.scenes[0];
      const std::string stem =
          std::string(region_id) + "_" + scene.sensing_date.to_string();
      const fs::path image_path = out_dir / "tiles" / (stem + ".msr1");
      write_scene(scene, image_path);
      ManifestRecord rec;
      rec.region_id = region_id;
      rec.country_iso3 = country;
      rec.sensing_date = scene.sensing_date;
      rec.image_path = fs::path("tiles") / (stem + ".msr1");
      rec.mask_path = fs::path("masks") / (std::string(region_id) + ".msr1");
      rec.cloud_fraction = 0.0;
      rec.coverage = 1.0;
      manifest.push_back(std::move(rec));
    }
    if (i % 5 == 0) {
      SynthSpec cloudy = rs;
      cloudy.separability.assign(1, spec.separability_low);
      cloudy.cloud_schedule.assign(1, 0.5);
      cloudy.seed = splitmix64(spec.seed + 2);
      SynthRegion extra = generate_region(cloudy, region_id);
      Scene& scene = extra.scenes[0];
      scene.sensing_date = Date{spec.year, 12, 28};  // clear of the schedule
      const std::string stem =
          std::string(region_id) + "_" + scene.sensing_date.to_string();
      const fs::path image_path = out_dir / "tiles" / (stem + ".msr1");
      const fs::path validity_path = out_dir / "valid" / (stem + ".msr1");
      write_scene(scene, image_path);
      write_validity(scene, validity_path);
      ManifestRecord rec;
      rec.region_id = region_id;
      rec.country_iso3 = country;
      rec.sensing_date = scene.sensing_date;
      rec.image_path = fs::path("tiles") / (stem + ".msr1");
      rec.mask_path = fs::path("masks") / (std::string(region_id) + ".msr1");
      rec.validity_path = fs::path("valid") / (stem + ".msr1");
      rec.cloud_fraction = 0.5;
      rec.coverage = 1.0;
      manifest.push_back(std::move(rec));
    }

    truth << nlohmann::json{
                 {"region_id", region_id},
                 {"planted_date",
                  region.scenes[region.planted_best].sensing_date.to_string()},
                 {"geometry", rs.geometry == MaskGeometry::Empty    ? "empty"
                              : rs.geometry == MaskGeometry::Fringe ? "fringe"
                                                                    : "blob"}}
                 .dump()
          << '\n';
  }

  CorpusOutput out;
  out.manifest_path = out_dir / "manifest.jsonl";
  out.truth_path = out_dir / "truth.jsonl";
  out.regions = static_cast<std::size_t>(spec.regions);
  out.records = manifest.size();
  write_manifest(manifest, out.manifest_path, manifest_header);
  return out;
}

}  // namespace mango
