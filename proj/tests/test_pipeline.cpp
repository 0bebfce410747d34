#include <doctest.h>

#include <fstream>
#include <map>

#include "mango/pipeline.hpp"
#include "test_support.hpp"

using namespace mango;
using test::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::map<std::string, std::string> truth_dates(
    const std::filesystem::path& truth_path) {
  std::map<std::string, std::string> out;
  std::ifstream in(truth_path);
  std::string line;
  while (std::getline(in, line)) {
    const nlohmann::json j = nlohmann::json::parse(line);
    if (j["geometry"] != "empty") {
      out[j["region_id"]] = j["planted_date"];
    }
  }
  return out;
}

struct StageOutputs {
  nlohmann::json filter_summary;
  nlohmann::json select_summary;
  std::filesystem::path report;
  std::filesystem::path splits;
  nlohmann::json stratify_summary;
  nlohmann::json split_summary;
};

// One complete pipeline pass in its own run directory. Run directories are
// siblings, so rebased relative paths come out identical across runs.
StageOutputs run_all(const std::filesystem::path& manifest,
                     const std::filesystem::path& run_dir, int workers) {
  std::filesystem::create_directories(run_dir);
  StageOutputs out;

  FilterOptions fo;
  fo.manifest = manifest;
  fo.out = run_dir / "filtered.jsonl";
  fo.workers = workers;
  out.filter_summary = run_filter(fo);

  SelectOptions so;
  so.manifest = fo.out;
  so.out = run_dir / "report.jsonl";
  so.workers = workers;
  out.select_summary = run_select(so);
  out.report = so.out;

  StratifyOptions sto;
  sto.in = so.out;
  sto.out = run_dir / "strat.jsonl";
  sto.config.seed = 42;
  out.stratify_summary = run_stratify(sto);

  SplitOptions spo;
  spo.in = sto.out;
  spo.out = run_dir / "splits.jsonl";
  spo.config.seed = 42;
  out.split_summary = run_split(spo);
  out.splits = spo.out;

  return out;
}

}  // namespace

TEST_CASE("full pipeline on a synthetic corpus") {
  TempDir dir("pipeline_e2e");

  CorpusSpec spec;
  spec.regions = 18;
  spec.countries = 5;
  spec.dates = 3;
  spec.tile_size = 24;
  spec.seed = 1234;
  const CorpusOutput corpus = generate_corpus(spec, dir.path / "corpus");

  const StageOutputs a = run_all(corpus.manifest_path, dir.path / "runA", 3);
  CHECK(a.filter_summary["regions_total"] == 18);
  CHECK(a.filter_summary["regions_empty"] == 0);
  CHECK(a.filter_summary["candidates_dropped"].get<int>() > 0);  // decoys
  CHECK(a.select_summary["failed"] == 0);
  CHECK(a.select_summary["selected"] == 18);

  // Every positive region recovers its planted date.
  const auto truth = truth_dates(corpus.truth_path);
  std::ifstream report(a.report);
  std::string line;
  std::size_t checked = 0;
  while (std::getline(report, line)) {
    const nlohmann::json j = nlohmann::json::parse(line);
    if (j.contains("provenance")) continue;
    const auto it = truth.find(j["region_id"]);
    if (it == truth.end()) {
      CHECK(j["selection_rule"] == "cloud_min");
      continue;
    }
    CHECK(j["chosen_date"] == it->second);
    CHECK(j["selection_rule"] == "argmax_j");
    ++checked;
  }
  CHECK(checked == truth.size());

  CHECK(a.split_summary["total_regions"] == a.stratify_summary["selected"]);
  const nlohmann::json stats = run_stats(a.splits);
  CHECK(stats["total"] == a.stratify_summary["selected"]);
  CHECK(stats["per_split"]["unsplit"] == 0);

  SUBCASE("all stage outputs are byte-identical across worker counts") {
    const StageOutputs b = run_all(corpus.manifest_path, dir.path / "runB", 1);
    for (const char* name :
         {"filtered.jsonl", "report.jsonl", "strat.jsonl", "splits.jsonl"}) {
      CHECK(slurp(dir.path / "runA" / name) ==
            slurp(dir.path / "runB" / name));
    }
  }
}

TEST_CASE("per-region failures are collected, not fatal") {
  TempDir dir("pipeline_fail");
  CorpusSpec spec;
  spec.regions = 4;
  spec.countries = 3;
  spec.dates = 2;
  spec.tile_size = 16;
  spec.seed = 77;
  const CorpusOutput corpus = generate_corpus(spec, dir.path / "corpus");

  // Corrupt one region's mask file.
  {
    std::ofstream out(dir.path / "corpus" / "masks" / "r00001.msr1",
                      std::ios::binary | std::ios::trunc);
    out << "junk";
  }

  SelectOptions so;
  so.manifest = corpus.manifest_path;
  so.out = dir.path / "report.jsonl";
  so.workers = 2;
  const nlohmann::json summary = run_select(so);
  CHECK(summary["failed"] == 1);
  CHECK(summary["selected"] == 3);
  CHECK(summary["failures"][0]["region_id"] == "r00001");
}

TEST_CASE("detection map dumps are written when requested") {
  TempDir dir("pipeline_dump");
  CorpusSpec spec;
  spec.regions = 2;
  spec.countries = 3;
  spec.dates = 2;
  spec.tile_size = 16;
  spec.seed = 9;
  const CorpusOutput corpus = generate_corpus(spec, dir.path / "corpus");

  SelectOptions so;
  so.manifest = corpus.manifest_path;
  so.out = dir.path / "report.jsonl";
  so.dump_detections = dir.path / "maps";
  so.workers = 1;
  run_select(so);

  std::size_t dumps = 0;
  for (const auto& entry :
       std::filesystem::directory_iterator(dir.path / "maps")) {
    CHECK(entry.path().extension() == ".msr1");
    ++dumps;
  }
  CHECK(dumps > 0);
}

TEST_CASE("masks_dir overrides the base for relative mask paths") {
  TempDir dir("pipeline_masks");
  CorpusSpec spec;
  spec.regions = 3;
  spec.countries = 3;
  spec.dates = 2;
  spec.tile_size = 16;
  spec.seed = 21;
  const CorpusOutput corpus = generate_corpus(spec, dir.path / "corpus");

  // Relocate the mask tree; the manifest still says "masks/...".
  std::filesystem::rename(dir.path / "corpus" / "masks",
                          dir.path / "relocated");

  SelectOptions so;
  so.manifest = corpus.manifest_path;
  so.out = dir.path / "report.jsonl";
  so.workers = 1;
  CHECK(run_select(so)["failed"] == 3);  // masks gone from the default base

  so.masks_dir = dir.path;  // "masks/x.msr1" now resolves under relocated/
  std::filesystem::rename(dir.path / "relocated", dir.path / "masks");
  const nlohmann::json summary = run_select(so);
  CHECK(summary["failed"] == 0);
  CHECK(summary["selected"] == 3);
}

TEST_CASE("provenance headers carry the config hash but no paths") {
  TempDir dir("pipeline_prov");
  CorpusSpec spec;
  spec.regions = 3;
  spec.countries = 3;
  spec.dates = 2;
  spec.tile_size = 16;
  spec.seed = 3;
  const CorpusOutput corpus = generate_corpus(spec, dir.path / "corpus");

  FilterOptions fo;
  fo.manifest = corpus.manifest_path;
  fo.out = dir.path / "filtered.jsonl";
  run_filter(fo);

  std::ifstream in(fo.out);
  std::string first;
  std::getline(in, first);
  const nlohmann::json j = nlohmann::json::parse(first);
  REQUIRE(j.contains("provenance"));
  CHECK(j["provenance"]["tool"] == "mango-curate");
  CHECK(j["provenance"]["command"] == "filter");
  CHECK(j["provenance"]["config"]["kappa"] == 0.05);
  CHECK(j["provenance"]["config_hash"].get<std::string>().size() == 16);
  CHECK(first.find(dir.path.string()) == std::string::npos);
}
