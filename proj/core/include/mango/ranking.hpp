#pragma once

#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mango/filter.hpp"
#include "mango/manifest.hpp"
#include "mango/matched_filter.hpp"
#include "mango/raster.hpp"
#include "mango/signature.hpp"
#include "mango/spectral_index.hpp"

namespace mango {

/// Per-class population moments of a detection map.
struct ClassStats {
  double mu_m = 0.0;
  double mu_b = 0.0;
  double var_m = 0.0;
  double var_b = 0.0;
  std::size_t n_m = 0;
  std::size_t n_b = 0;
};

enum class CandidateStatus {
  Scored,
  InvalidInsufficientBackground,
  InvalidSignatureUnobservable,
  NegativePath,
};

const char* to_string(CandidateStatus s);

struct CandidateScore {
  Date sensing_date;
  CandidateStatus status = CandidateStatus::Scored;
  std::optional<ClassStats> stats;
  std::optional<double> j_value;  // present iff status == Scored; may be +inf
  std::optional<double> cloud_fraction;
  std::optional<double> coverage;
  std::string note;  // failure detail for invalid candidates
};

enum class SelectionRule { ArgmaxJ, CloudMin };

const char* to_string(SelectionRule r);

struct SelectionResult {
  std::string region_id;
  std::string country_iso3;
  double mangrove_frac = 0.0;
  Category category = Category::PureNegative;
  DetectionMethod method = DetectionMethod::MatchedFilter;
  SelectionRule selection_rule = SelectionRule::ArgmaxJ;
  Date chosen_date;
  std::string image_path;
  std::string mask_path;
  std::optional<std::string> validity_path;
  ReferenceSet references;  // empty on the negative path
  std::vector<CandidateScore> scores;

  nlohmann::json to_json() const;
};

struct SelectConfig {
  DetectionMethod method = DetectionMethod::MatchedFilter;
  SignatureConfig signature;
  MatchedFilterConfig matched_filter;
  BandRoles roles;
};

using SceneLoader = std::function<Scene(const ManifestRecord&)>;
using DetectionSink =
    std::function<void(const ManifestRecord&, const DetectionMap&)>;

/// Population mean/variance of the defined detection values over each class
/// coordinate set. Undefined (sentinel) pixels are excluded; a class left
/// empty raises SignatureUnobservableError.
ClassStats class_stats(const DetectionMap& map,
                       const std::vector<PixelCoord>& mangrove_coords,
                       const std::vector<PixelCoord>& background_coords);

/// Fisher discriminant ratio of the two classes:
///   J = (mu_m - mu_b)^2 / (var_m + var_b)
/// Degenerate conventions: zero variance sum yields +infinity when the means
/// differ and 0 when they agree.
double fdr(const ClassStats& stats);

/// Scores every candidate of a region and picks the winner. Positive tiles
/// run signature -> detection -> class stats -> FDR per candidate and take
/// the highest J (ties: earliest date; +inf outranks any finite J). Tiles
/// whose mask has no mangrove pixels, and pools where no candidate could be
/// scored, fall back to the lowest cloud fraction (ties: earliest date).
/// Throws Error on an empty pool. `sink`, when given, receives every
/// computed detection map.
SelectionResult select_best(const CandidatePool& pool, const AnnualMask& mask,
                            const SelectConfig& cfg, const SceneLoader& loader,
                            const DetectionSink& sink = nullptr);

/// Renders selection results as one JSON object per line, sorted by
/// region_id. Re-rendering the same results is byte-identical. `header`,
/// when given, is emitted first as {"provenance": header}.
std::string rank_report(
    const std::vector<SelectionResult>& results,
    const std::optional<nlohmann::json>& header = std::nullopt);

}  // namespace mango
