#include <doctest.h>

#include <fstream>

#include "mango/error.hpp"
#include "mango/manifest.hpp"
#include "mango/synth.hpp"
#include "test_support.hpp"

using namespace mango;
using test::TempDir;

TEST_CASE("generated regions are bit-identical under the same seed") {
  SynthSpec spec;
  spec.separability = {0.5, 6.0, 0.5};
  spec.cloud_schedule = {0.01, 0.0, 0.02};
  spec.seed = 321;

  const SynthRegion a = generate_region(spec, "twin");
  const SynthRegion b = generate_region(spec, "twin");
  REQUIRE(a.scenes.size() == 3);
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(a.scenes[t].pixels == b.scenes[t].pixels);
    CHECK(a.scenes[t].valid == b.scenes[t].valid);
  }
  CHECK(a.mask.grid == b.mask.grid);

  const SynthRegion other = generate_region(spec, "not-twin");
  CHECK(a.scenes[0].pixels != other.scenes[0].pixels);
}

TEST_CASE("planted date is the schedule argmax") {
  SynthSpec spec;
  spec.separability = {0.5, 6.0, 0.5};
  spec.cloud_schedule = {0.0, 0.0, 0.0};
  CHECK(generate_region(spec, "r").planted_best == 1);

  spec.separability = {3.0, 1.0, 2.0};
  CHECK(generate_region(spec, "r").planted_best == 0);
}

TEST_CASE("empty geometry produces a pure-negative mask") {
  SynthSpec spec;
  spec.geometry = MaskGeometry::Empty;
  spec.separability = {1.0};
  spec.cloud_schedule = {0.0};
  const SynthRegion region = generate_region(spec, "neg");
  CHECK(region.mask.true_count() == 0);
}

TEST_CASE("cloud schedule invalidates the requested pixel share") {
  SynthSpec spec;
  spec.tile_size = 20;
  spec.separability = {1.0};
  spec.cloud_schedule = {0.25};
  const SynthRegion region = generate_region(spec, "cloudy");
  const Scene& s = region.scenes[0];
  const std::size_t invalid =
      s.pixel_count() - BoolGrid{20, 20, s.valid}.true_count();
  CHECK(invalid == 100);  // floor(0.25 * 400)
}

TEST_CASE("spec validation") {
  SynthSpec spec;
  CHECK_THROWS_AS(generate_region(spec, "r"), Error);  // empty schedule
  spec.separability = {1.0};
  spec.cloud_schedule = {0.0, 0.0};
  CHECK_THROWS_AS(generate_region(spec, "r"), Error);  // length mismatch
}

TEST_CASE("corpus generation emits a readable manifest and truth file") {
  TempDir dir("synth_corpus");
  CorpusSpec spec;
  spec.regions = 8;
  spec.countries = 4;
  spec.dates = 3;
  spec.seed = 5;
  const CorpusOutput out = generate_corpus(spec, dir.path);

  const auto records = read_manifest(out.manifest_path);
  CHECK(records.size() == out.records);
  CHECK(records.size() >= static_cast<std::size_t>(spec.regions * spec.dates));
  for (const auto& r : records) {
    CHECK(std::filesystem::exists(dir.path / r.image_path));
    CHECK(std::filesystem::exists(dir.path / r.mask_path));
  }

  std::ifstream truth(out.truth_path);
  std::size_t lines = 0;
  std::string line;
  while (std::getline(truth, line)) ++lines;
  CHECK(lines == 8);
}
