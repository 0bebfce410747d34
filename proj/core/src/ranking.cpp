#include "mango/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mango/error.hpp"
#include "mango/stratify.hpp"

namespace mango {

namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  std::size_t count = 0;
};

// Two-pass population moments over the defined pixels of one class set.
Moments class_moments(const DetectionMap& map,
                      const std::vector<PixelCoord>& coords) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const PixelCoord& p : coords) {
    const double v = map.at(p.row, p.col);
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  Moments m;
  m.count = n;
  if (n == 0) return m;
  m.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const PixelCoord& p : coords) {
    const double v = map.at(p.row, p.col);
    if (std::isnan(v)) continue;
    const double d = v - m.mean;
    ss += d * d;
  }
  m.variance = ss / static_cast<double>(n);
  return m;
}

double effective_cloud(const ManifestRecord& rec, const SceneLoader& loader) {
  if (rec.cloud_fraction) return *rec.cloud_fraction;
  return cloud_fraction(loader(rec));
}

nlohmann::json json_j(double j) {
  // JSON has no infinity literal; FDR of a perfectly separated pair is
  // serialized as the string "inf".
  if (std::isinf(j)) return "inf";
  return j;
}

}  // namespace

const char* to_string(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::Scored: return "scored";
    case CandidateStatus::InvalidInsufficientBackground:
      return "invalid_insufficient_background";
    case CandidateStatus::InvalidSignatureUnobservable:
      return "invalid_signature_unobservable";
    case CandidateStatus::NegativePath: return "negative_path";
  }
  return "?";
}

const char* to_string(SelectionRule r) {
  return r == SelectionRule::ArgmaxJ ? "argmax_j" : "cloud_min";
}

ClassStats class_stats(const DetectionMap& map,
                       const std::vector<PixelCoord>& mangrove_coords,
                       const std::vector<PixelCoord>& background_coords) {
  const Moments m = class_moments(map, mangrove_coords);
  const Moments b = class_moments(map, background_coords);
  if (m.count == 0 || b.count == 0) {
    throw SignatureUnobservableError(
        "empty class after undefined-pixel exclusion");
  }
  return ClassStats{m.mean, b.mean, m.variance, b.variance, m.count, b.count};
}

double fdr(const ClassStats& stats) {
  const double gap = stats.mu_m - stats.mu_b;
  const double denom = stats.var_m + stats.var_b;
  if (denom == 0.0) {
    return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return gap * gap / denom;
}

SelectionResult select_best(const CandidatePool& pool, const AnnualMask& mask,
                            const SelectConfig& cfg, const SceneLoader& loader,
                            const DetectionSink& sink) {
  if (pool.candidates.empty()) {
    throw Error("no candidates for region " + pool.region_id);
  }

  SelectionResult result;
  result.region_id = pool.region_id;
  result.country_iso3 = pool.country_iso3;
  result.mask_path = pool.mask_path;
  result.method = cfg.method;
  result.mangrove_frac = mangrove_fraction(mask);
  result.category = categorize(result.mangrove_frac);

  const bool positive = mask.true_count() > 0;
  if (positive) {
    const BoolGrid eroded = erode(mask, cfg.signature.structuring_element);
    result.references = sample_reference_pixels(eroded, mask, cfg.signature,
                                                pool.region_id);
  }

  for (const ManifestRecord& rec : pool.candidates) {
    CandidateScore score;
    score.sensing_date = rec.sensing_date;
    score.cloud_fraction = rec.cloud_fraction;
    score.coverage = rec.coverage;

    if (!positive) {
      score.status = CandidateStatus::NegativePath;
      result.scores.push_back(std::move(score));
      continue;
    }

    try {
      const Scene scene = loader(rec);
      if (scene.width != mask.width || scene.height != mask.height) {
        throw RasterError("scene/mask dimension mismatch for " +
                          pool.region_id);
      }
      DetectionMap dmap;
      if (cfg.method == DetectionMethod::MatchedFilter) {
        const Spectrum target = target_spectrum(scene, result.references);
        const BackgroundStats stats =
            background_stats(scene, mask, cfg.matched_filter);
        dmap = detect(scene, stats, target);
      } else {
        dmap = mvi_map(scene, cfg.roles);
      }
      if (sink) sink(rec, dmap);

      BoolGrid valid{scene.width, scene.height, scene.valid};
      const auto [mangrove_coords, background_coords] =
          class_pixel_sets(mask, valid);
      score.stats = class_stats(dmap, mangrove_coords, background_coords);
      score.j_value = fdr(*score.stats);
      score.status = CandidateStatus::Scored;
    } catch (const InsufficientBackgroundError& e) {
      score.status = CandidateStatus::InvalidInsufficientBackground;
      score.note = e.what();
    } catch (const DegenerateBackgroundError& e) {
      score.status = CandidateStatus::InvalidInsufficientBackground;
      score.note = e.what();
    } catch (const SignatureUnobservableError& e) {
      score.status = CandidateStatus::InvalidSignatureUnobservable;
      score.note = e.what();
    } catch (const DegenerateSignatureError& e) {
      score.status = CandidateStatus::InvalidSignatureUnobservable;
      score.note = e.what();
    }
    result.scores.push_back(std::move(score));
  }

  // Argmax over scored candidates; candidates are in ascending date order,
  // so a strict > keeps the earliest date on ties.
  std::size_t chosen = pool.candidates.size();
  double best_j = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < result.scores.size(); ++i) {
    if (result.scores[i].status != CandidateStatus::Scored) continue;
    if (chosen == pool.candidates.size() || *result.scores[i].j_value > best_j) {
      chosen = i;
      best_j = *result.scores[i].j_value;
    }
  }

  if (chosen != pool.candidates.size()) {
    result.selection_rule = SelectionRule::ArgmaxJ;
  } else {
    // Pure-negative tile, or nothing scored: lowest cloud fraction wins.
    result.selection_rule = SelectionRule::CloudMin;
    double best_cloud = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.candidates.size(); ++i) {
      const double cloud = effective_cloud(pool.candidates[i], loader);
      if (!result.scores[i].cloud_fraction) {
        result.scores[i].cloud_fraction = cloud;
      }
      if (cloud < best_cloud) {
        best_cloud = cloud;
        chosen = i;
      }
    }
  }

  const ManifestRecord& winner = pool.candidates[chosen];
  result.chosen_date = winner.sensing_date;
  result.image_path = winner.image_path;
  result.validity_path = winner.validity_path;
  return result;
}

nlohmann::json SelectionResult::to_json() const {
  nlohmann::json refs = nlohmann::json::object();
  refs["provenance"] = references.provenance();
  refs["count"] = references.coords.size();
  nlohmann::json coords = nlohmann::json::array();
  for (const PixelCoord& p : references.coords) {
    coords.push_back(nlohmann::json::array({p.row, p.col}));
  }
  refs["coords"] = std::move(coords);

  nlohmann::json cands = nlohmann::json::array();
  for (const CandidateScore& s : scores) {
    nlohmann::json c;
    c["sensing_date"] = s.sensing_date.to_string();
    c["status"] = to_string(s.status);
    if (s.j_value) c["j"] = json_j(*s.j_value);
    if (s.stats) {
      c["mu_m"] = s.stats->mu_m;
      c["mu_b"] = s.stats->mu_b;
      c["var_m"] = s.stats->var_m;
      c["var_b"] = s.stats->var_b;
      c["n_m"] = s.stats->n_m;
      c["n_b"] = s.stats->n_b;
    }
    if (s.cloud_fraction) c["cloud_fraction"] = *s.cloud_fraction;
    if (s.coverage) c["coverage"] = *s.coverage;
    if (!s.note.empty()) c["note"] = s.note;
    cands.push_back(std::move(c));
  }

  nlohmann::json j;
  j["region_id"] = region_id;
  j["country_iso3"] = country_iso3;
  j["mangrove_fraction"] = mangrove_frac;
  j["category"] = to_string(category);
  j["method"] = to_string(method);
  j["selection_rule"] = to_string(selection_rule);
  j["chosen_date"] = chosen_date.to_string();
  j["image_path"] = image_path;
  j["mask_path"] = mask_path;
  if (validity_path) j["validity_path"] = *validity_path;
  j["references"] = std::move(refs);
  j["candidates"] = std::move(cands);
  return j;
}

std::string rank_report(const std::vector<SelectionResult>& results,
                        const std::optional<nlohmann::json>& header) {
  std::vector<const SelectionResult*> order;
  order.reserve(results.size());
  for (const auto& r : results) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const SelectionResult* a, const SelectionResult* b) {
              return a->region_id < b->region_id;
            });

  std::string out;
  if (header) {
    out += nlohmann::json{{"provenance", *header}}.dump();
    out += '\n';
  }
  for (const SelectionResult* r : order) {
    out += r->to_json().dump();
    out += '\n';
  }
  return out;
}

}  // namespace mango
