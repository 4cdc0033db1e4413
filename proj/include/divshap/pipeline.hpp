#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "divshap/dataset.hpp"
#include "divshap/diversity_graph.hpp"
#include "divshap/elm.hpp"
#include "divshap/mining.hpp"
#include "divshap/transform.hpp"

namespace divshap {

enum class EvalMode { CrossValidation, TrainingAccuracy };

std::string to_string(EvalMode m);
EvalMode eval_mode_from_string(const std::string& name);

struct EvalConfig {
  EvalMode mode = EvalMode::CrossValidation;
  std::size_t folds = 5;
  std::size_t repeats = 5;
  std::uint64_t seed = 1;
};

struct PipelineConfig {
  std::size_t kappa = 9;
  MiningConfig mining;
  /// Applied to mining, the similarity predicate, and the transform;
  /// overrides mining.distance.
  DistanceConfig distance;
  ElmConfig elm;
  EvalConfig eval;
  bool same_class_only = true;
  std::size_t workers = 1;
};

struct SweepEntry {
  std::size_t k = 0;
  double accuracy = 0.0;                     ///< mean evaluation accuracy on train
  std::vector<std::size_t> class_composition;  ///< selected shapelets per label code
};

struct KSelection {
  std::size_t k = 0;
  std::vector<Shapelet> shapelets;   ///< first k of `diversified`
  std::vector<Shapelet> diversified; ///< greedy top-kappa, in selection order
  std::vector<SweepEntry> sweep;
};

/// Evaluates each k in [1, min(kappa, |diversified|)] on `train` and keeps
/// the most accurate, preferring smaller k on ties.
KSelection select_k(std::vector<Shapelet> diversified, const Dataset& train, const PipelineConfig& cfg);

template <class Graph>
KSelection select_k(const Graph& graph, const Dataset& train, const PipelineConfig& cfg) {
  if (graph.size() == 0) throw Error(ErrorCode::EmptyInput, "diversity graph has no vertices");
  std::vector<Shapelet> top;
  for (auto i : div_topk_indices(graph, cfg.kappa)) top.push_back(graph.vertex(i));
  return select_k(std::move(top), train, cfg);
}

/// Mean accuracy of an ELM on `features` under the configured evaluation
/// protocol. `salt` separates ELM seeds between callers (e.g. the k value).
double evaluate_features(const FeatureMatrix& features, const Dataset& train, const PipelineConfig& cfg,
                         std::uint64_t salt);

struct PipelineModel {
  std::size_t series_length = 0;
  std::vector<std::string> label_names;
  std::size_t selected_k = 0;
  std::vector<Shapelet> shapelets;
  std::vector<Shapelet> diversified;
  MinMaxScaling scaling;
  ElmModel elm;
  std::vector<SweepEntry> sweep;
  std::size_t candidate_count = 0;
  PipelineConfig config;
};

struct FitTimings {
  double candidate_selection = 0.0;    ///< mining, seconds
  double diversified_selection = 0.0;  ///< greedy top-kappa plus the k sweep
  double final_training = 0.0;
};

PipelineModel fit(const Dataset& train, const PipelineConfig& cfg, FitTimings* timings = nullptr);

/// fit() with an already mined candidate list (sorted by mining_order).
PipelineModel fit_with_candidates(const Dataset& train, std::vector<ScoredCandidate> mined,
                                  const PipelineConfig& cfg, FitTimings* timings = nullptr);

/// Transformed and scaled features of `d` under a fitted model.
FeatureMatrix model_features(const PipelineModel& model, const Dataset& d);

struct Prediction {
  std::vector<int> labels;
  std::optional<double> accuracy;  ///< absent for an empty test set
};

Prediction predict_pipeline(const PipelineModel& model, const Dataset& test);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

nlohmann::json to_json(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineModel& model);
PipelineModel pipeline_model_from_json(const nlohmann::json& j);

void save_model(const PipelineModel& model, const std::filesystem::path& path);
PipelineModel load_model(const std::filesystem::path& path);

}  // namespace divshap
