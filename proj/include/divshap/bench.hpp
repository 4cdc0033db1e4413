#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "divshap/pipeline.hpp"

namespace divshap {

enum class SampleKind { RawSeries, Transformed };

struct LabeledSamples {
  Eigen::MatrixXd x;  ///< one row per sample
  std::vector<int> labels;
  SampleKind kind = SampleKind::RawSeries;
};

LabeledSamples raw_samples(const Dataset& d);
LabeledSamples transformed_samples(const FeatureMatrix& fm);

/// Euclidean 1-nearest-neighbour labels; ties go to the lower training index.
std::vector<int> nn_predict(const LabeledSamples& train, const LabeledSamples& test);
double baseline_1nn(const LabeledSamples& train, const LabeledSamples& test);

struct PhaseTimings {
  double candidate_selection = 0.0;
  double diversified_selection = 0.0;
  double final_training = 0.0;
  double transform = 0.0;          ///< train + test transform with the selected shapelets
  double classify_divshap = 0.0;   ///< ELM predict on transformed test
  double train_elm = 0.0;          ///< raw-series ELM training
  double classify_elm = 0.0;       ///< ELM predict on raw test
  double nn = 0.0;                 ///< both 1NN baselines
  double total = 0.0;
};

struct ExperimentReport {
  std::string dataset;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t series_length = 0;
  std::optional<double> raw_elm;
  std::optional<double> divshap_elm;
  std::optional<double> raw_1nn;
  std::optional<double> transformed_1nn;
  std::size_t selected_k = 0;
  std::size_t candidate_count = 0;
  std::vector<SweepEntry> sweep;
  std::vector<std::optional<double>> sweep_test_accuracy;  ///< parallel to sweep; filled by run_sweep
  PhaseTimings timings;
  PipelineConfig config;
};

/// Raw ELM, DivShapELM and both 1NN baselines on one train/test split.
/// `mined` skips mining when the caller already holds the sorted candidates.
ExperimentReport run_compare(const Dataset& train, const Dataset& test, const PipelineConfig& cfg,
                             const std::vector<ScoredCandidate>* mined = nullptr);

/// Fits once and reports, for every evaluated k, the training-side evaluation
/// accuracy next to the test accuracy of an ELM on the first k shapelets.
ExperimentReport run_sweep(const Dataset& train, const Dataset& test, const PipelineConfig& cfg);

nlohmann::json to_json(const ExperimentReport& r);
void write_report_json(std::ostream& out, const ExperimentReport& r);
/// One header row, one data row.
void write_report_csv(std::ostream& out, const ExperimentReport& r);
void print_report_table(std::ostream& out, const ExperimentReport& r);
/// k,cv_accuracy,test_accuracy,composition (one row per evaluated k).
void write_sweep_csv(std::ostream& out, const ExperimentReport& r);

}  // namespace divshap
