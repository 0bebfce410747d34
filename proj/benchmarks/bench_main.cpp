// Microbenchmarks for the per-candidate hot path at production tile size
// (256x256x13, the shape every real region runs through).

#include <benchmark/benchmark.h>

#include <map>

#include "mango/matched_filter.hpp"
#include "mango/ranking.hpp"
#include "mango/signature.hpp"
#include "mango/spectral_index.hpp"
#include "mango/synth.hpp"

namespace {

using namespace mango;

SynthRegion production_region(int dates = 1) {
  SynthSpec spec;
  spec.tile_size = 256;
  spec.bands = 13;
  spec.blob_fraction = 0.2;
  spec.seed = 12345;
  spec.separability.assign(dates, 2.0);
  spec.cloud_schedule.assign(dates, 0.01);
  return generate_region(spec, "bench");
}

void BM_Erode(benchmark::State& state) {
  const SynthRegion region = production_region();
  const int side = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(erode(region.mask, side));
  }
  state.SetItemsProcessed(state.iterations() * 256 * 256);
}
BENCHMARK(BM_Erode)->Arg(3)->Arg(5)->Arg(9);

void BM_BackgroundStats(benchmark::State& state) {
  const SynthRegion region = production_region();
  for (auto _ : state) {
    benchmark::DoNotOptimize(background_stats(region.scenes[0], region.mask));
  }
  state.SetItemsProcessed(state.iterations() * 256 * 256);
}
BENCHMARK(BM_BackgroundStats);

void BM_Detect(benchmark::State& state) {
  const SynthRegion region = production_region();
  const Scene& scene = region.scenes[0];
  const ReferenceSet refs = sample_reference_pixels(
      erode(region.mask, 5), region.mask, SignatureConfig{}, "bench");
  const Spectrum target = target_spectrum(scene, refs);
  const BackgroundStats stats = background_stats(scene, region.mask);
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect(scene, stats, target));
  }
  state.SetItemsProcessed(state.iterations() * 256 * 256);
}
BENCHMARK(BM_Detect);

void BM_MviMap(benchmark::State& state) {
  const SynthRegion region = production_region();
  const BandRoles roles{2, 7, 10};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mvi_map(region.scenes[0], roles));
  }
  state.SetItemsProcessed(state.iterations() * 256 * 256);
}
BENCHMARK(BM_MviMap);

void BM_ClassStatsFdr(benchmark::State& state) {
  const SynthRegion region = production_region();
  const Scene& scene = region.scenes[0];
  const ReferenceSet refs = sample_reference_pixels(
      erode(region.mask, 5), region.mask, SignatureConfig{}, "bench");
  const BackgroundStats stats = background_stats(scene, region.mask);
  const DetectionMap map = detect(scene, stats, target_spectrum(scene, refs));
  BoolGrid valid{scene.width, scene.height, scene.valid};
  const auto [mc, bc] = class_pixel_sets(region.mask, valid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdr(class_stats(map, mc, bc)));
  }
}
BENCHMARK(BM_ClassStatsFdr);

// Whole-region selection: the unit of work the worker pool distributes.
void BM_SelectRegion(benchmark::State& state) {
  const int dates = static_cast<int>(state.range(0));
  const SynthRegion region = production_region(dates);

  CandidatePool pool;
  pool.region_id = "bench";
  pool.country_iso3 = "AAA";
  pool.mask_path = "mem";
  std::map<std::string, Scene> scenes;
  for (const Scene& s : region.scenes) {
    ManifestRecord rec;
    rec.region_id = "bench";
    rec.country_iso3 = "AAA";
    rec.sensing_date = s.sensing_date;
    rec.image_path = "mem";
    rec.mask_path = "mem";
    rec.coverage = 1.0;
    pool.candidates.push_back(rec);
    scenes[s.sensing_date.to_string()] = s;
  }
  const SceneLoader loader = [&](const ManifestRecord& rec) {
    return scenes.at(rec.sensing_date.to_string());
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        select_best(pool, region.mask, SelectConfig{}, loader));
  }
  state.SetItemsProcessed(state.iterations() * dates);
}
BENCHMARK(BM_SelectRegion)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
