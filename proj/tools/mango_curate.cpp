// mango-curate: curates single-date multispectral image-mask pairs from
// multi-date candidate pools. Subcommands mirror the pipeline stages:
//   synth -> filter -> select -> stratify -> split -> stats
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "mango/error.hpp"
#include "mango/parallel.hpp"
#include "mango/pipeline.hpp"
#include "mango/version.hpp"

namespace {

void emit(const nlohmann::json& summary, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << summary.dump(2) << '\n';
  } else {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw mango::IoError("cannot open " + out_path + " for writing");
    out << summary.dump(2) << '\n';
  }
}

// JSON config file whose keys are long option names; command-line flags win.
void apply_config_defaults(CLI::App* cmd, const std::string& config_path) {
  if (config_path.empty()) return;
  std::ifstream in(config_path);
  if (!in) throw mango::IoError("cannot open config " + config_path);
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw mango::Error("bad config JSON: " + std::string(e.what()));
  }
  for (const auto& [key, value] : cfg.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw mango::Error("config key '" + key + "' does not match an option");
    }
    if (opt->count() > 0) continue;  // explicit flag wins
    const std::string text =
        value.is_string() ? value.get<std::string>() : value.dump();
    opt->add_result(text);
    opt->run_callback();  // convert and assign into the bound variable
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mango-curate: single-date scene selection and dataset curation"};
  app.set_version_flag("--version", mango::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON file with defaults for the subcommand's options")
      ->expected(1);

  // filter
  auto* filter_cmd =
      app.add_subcommand("filter", "Apply cloud/coverage/year thresholds");
  mango::FilterOptions filter_opts;
  filter_opts.workers = mango::default_worker_count();
  std::string filter_manifest, filter_out, filter_summary_path;
  filter_cmd->add_option("--manifest", filter_manifest, "Input manifest (JSONL)")
      ->required();
  filter_cmd->add_option("--out", filter_out, "Filtered manifest path")
      ->required();
  filter_cmd->add_option("--kappa", filter_opts.config.kappa,
                         "Cloud-fraction ceiling (strict <)")->capture_default_str();
  filter_cmd->add_option("--omega", filter_opts.config.omega,
                         "Coverage floor (>=)")->capture_default_str();
  filter_cmd->add_option("--year", filter_opts.config.year, "Target year")->capture_default_str();
  filter_cmd->add_option("--workers", filter_opts.workers,
                         "Worker threads (default: MANGO_WORKERS or cores)");
  filter_cmd->add_option("--summary", filter_summary_path,
                         "Write the JSON summary here instead of stdout");

  // select
  auto* select_cmd = app.add_subcommand(
      "select", "Score candidates and pick the best date per region");
  mango::SelectOptions select_opts;
  select_opts.workers = mango::default_worker_count();
  std::string select_manifest, select_out, select_masks, select_dump,
      select_method = "mf", select_summary_path;
  select_cmd->add_option("--manifest", select_manifest,
                         "Filtered manifest (JSONL)")
      ->required();
  select_cmd->add_option("--out", select_out, "Selection report path (JSONL)")
      ->required();
  select_cmd->add_option("--masks", select_masks,
                         "Base directory for relative mask paths");
  select_cmd->add_option("--method", select_method, "mf | mvi")->capture_default_str()
      ->check(CLI::IsMember({"mf", "mvi"}));
  select_cmd->add_option("--dump-detections", select_dump,
                         "Dump per-candidate detection maps into this directory");
  select_cmd->add_option("--epsilon", select_opts.config.matched_filter.epsilon,
                         "Covariance ridge (relative to trace/B)")->capture_default_str();
  select_cmd->add_option("--k", select_opts.config.signature.k_pixels,
                         "Reference pixels per region")->capture_default_str();
  select_cmd->add_option("--element",
                         select_opts.config.signature.structuring_element,
                         "Erosion structuring element side (odd)")->capture_default_str();
  select_cmd->add_option("--exclude-radius",
                         select_opts.config.matched_filter.boundary_exclusion_radius,
                         "Background exclusion radius around the mask")->capture_default_str();
  select_cmd->add_option("--seed-namespace",
                         select_opts.config.signature.rng_seed_namespace,
                         "Seed namespace mixed with region ids");
  select_cmd->add_option("--green", select_opts.config.roles.green_index,
                         "Green band index")->capture_default_str();
  select_cmd->add_option("--nir", select_opts.config.roles.nir_index,
                         "NIR band index")->capture_default_str();
  select_cmd->add_option("--swir1", select_opts.config.roles.swir1_index,
                         "SWIR1 band index")->capture_default_str();
  select_cmd->add_option("--workers", select_opts.workers,
                         "Worker threads (default: MANGO_WORKERS or cores)");
  select_cmd->add_option("--summary", select_summary_path,
                         "Write the JSON summary here instead of stdout");

  // stratify
  auto* stratify_cmd = app.add_subcommand(
      "stratify", "Balance categories by seeded subsampling");
  mango::StratifyOptions stratify_opts;
  std::string stratify_in, stratify_out, stratify_summary_path;
  stratify_cmd->add_option("--in", stratify_in, "Selection report (JSONL)")
      ->required();
  stratify_cmd->add_option("--out", stratify_out, "Balanced records path")
      ->required();
  stratify_cmd
      ->add_option("--seed", stratify_opts.config.seed, "Subsampling seed")
      ->required();
  stratify_cmd->add_option("--strong-min", stratify_opts.config.strong_min,
                           "Strong-positive fraction threshold")->capture_default_str();
  stratify_cmd->add_option("--mid-min", stratify_opts.config.mid_min,
                           "Mid-positive fraction threshold")->capture_default_str();
  stratify_cmd->add_option("--tolerance", stratify_opts.config.ratio_tolerance,
                           "Allowed relative excess over stratum targets")->capture_default_str();
  stratify_cmd->add_option("--summary", stratify_summary_path,
                           "Write the JSON summary here instead of stdout");

  // split
  auto* split_cmd =
      app.add_subcommand("split", "Country-disjoint train/val/test assignment");
  mango::SplitOptions split_opts;
  std::string split_in, split_out, split_summary_path;
  split_cmd->add_option("--in", split_in, "Balanced records (JSONL)")
      ->required();
  split_cmd->add_option("--out", split_out, "Records with split assignments")
      ->required();
  split_cmd->add_option("--seed", split_opts.config.seed, "Tie-break seed")
      ->required();
  split_cmd->add_option("--train", split_opts.config.fractions[0],
                        "Train fraction")->capture_default_str();
  split_cmd->add_option("--val", split_opts.config.fractions[1],
                        "Val fraction")->capture_default_str();
  split_cmd->add_option("--test", split_opts.config.fractions[2],
                        "Test fraction")->capture_default_str();
  split_cmd->add_option("--summary", split_summary_path,
                        "Write the JSON summary here instead of stdout");

  // stats
  auto* stats_cmd =
      app.add_subcommand("stats", "Composition summary of a record file");
  std::string stats_in, stats_out;
  stats_cmd->add_option("--in", stats_in, "Dataset records (JSONL)")
      ->required();
  stats_cmd->add_option("--out", stats_out,
                        "Write the summary here instead of stdout");

  // synth
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic corpus of MSR1 tiles");
  std::string synth_spec_path, synth_out_dir, synth_summary_path;
  mango::CorpusSpec synth_spec;
  synth_cmd->add_option("--spec", synth_spec_path,
                        "Corpus spec JSON (flags override its fields)");
  synth_cmd->add_option("--out", synth_out_dir, "Output directory")->required();
  synth_cmd->add_option("--regions", synth_spec.regions, "Region count")->capture_default_str();
  synth_cmd->add_option("--countries", synth_spec.countries, "Country count")
      ->capture_default_str();
  synth_cmd->add_option("--tile-size", synth_spec.tile_size, "Tile side")->capture_default_str();
  synth_cmd->add_option("--bands", synth_spec.bands, "Band count")->capture_default_str();
  synth_cmd->add_option("--dates", synth_spec.dates, "Dates per region")->capture_default_str();
  synth_cmd->add_option("--seed", synth_spec.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--summary", synth_summary_path,
                        "Write the JSON summary here instead of stdout");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      return app.exit(e) == 0 ? 0 : 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    apply_config_defaults(sub, config_path);

    if (filter_cmd->parsed()) {
      filter_opts.manifest = filter_manifest;
      filter_opts.out = filter_out;
      emit(mango::run_filter(filter_opts), filter_summary_path);
    } else if (select_cmd->parsed()) {
      select_opts.manifest = select_manifest;
      select_opts.out = select_out;
      if (!select_masks.empty()) select_opts.masks_dir = select_masks;
      if (!select_dump.empty()) select_opts.dump_detections = select_dump;
      select_opts.config.method =
          mango::detection_method_from_string(select_method);
      emit(mango::run_select(select_opts), select_summary_path);
    } else if (stratify_cmd->parsed()) {
      stratify_opts.in = stratify_in;
      stratify_opts.out = stratify_out;
      emit(mango::run_stratify(stratify_opts), stratify_summary_path);
    } else if (split_cmd->parsed()) {
      split_opts.in = split_in;
      split_opts.out = split_out;
      emit(mango::run_split(split_opts), split_summary_path);
    } else if (stats_cmd->parsed()) {
      emit(mango::run_stats(stats_in), stats_out);
    } else if (synth_cmd->parsed()) {
      if (!synth_spec_path.empty()) {
        std::ifstream in(synth_spec_path);
        if (!in) throw mango::IoError("cannot open " + synth_spec_path);
        nlohmann::json j = nlohmann::json::parse(in);
        mango::CorpusSpec from_file = mango::CorpusSpec::from_json(j);
        // Flags given on the command line override the file.
        if (synth_cmd->count("--regions") == 0) synth_spec.regions = from_file.regions;
        if (synth_cmd->count("--countries") == 0) synth_spec.countries = from_file.countries;
        if (synth_cmd->count("--tile-size") == 0) synth_spec.tile_size = from_file.tile_size;
        if (synth_cmd->count("--bands") == 0) synth_spec.bands = from_file.bands;
        if (synth_cmd->count("--dates") == 0) synth_spec.dates = from_file.dates;
        if (synth_cmd->count("--seed") == 0) synth_spec.seed = from_file.seed;
        synth_spec.separability_high = from_file.separability_high;
        synth_spec.separability_low = from_file.separability_low;
        synth_spec.cloud_max = from_file.cloud_max;
        synth_spec.negative_share = from_file.negative_share;
        synth_spec.fringe_share = from_file.fringe_share;
        synth_spec.year = from_file.year;
      }
      mango::SynthOptions opts;
      opts.out_dir = synth_out_dir;
      opts.spec = synth_spec;
      emit(mango::run_synth(opts), synth_summary_path);
    }
    return 0;
  } catch (const mango::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
