#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "divshap/dataset.hpp"
#include "divshap/shapelet.hpp"

namespace divshap {

/// One row per series, one column per shapelet (distance units until scaled).
struct FeatureMatrix {
  Eigen::MatrixXd values;
  std::vector<int> labels;
  std::vector<std::string> column_ids;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

/// Per-column min/max fitted on training features.
struct MinMaxScaling {
  std::vector<double> min;
  std::vector<double> max;
};

/// Stable column id: "s<source>_<start>_<length>".
std::string shapelet_id(const ScoredCandidate& s);

FeatureMatrix transform(const Dataset& d, std::span<const Shapelet> shapelets,
                        const DistanceConfig& cfg, std::size_t workers = 1);

/// The raw series as features (one column per sample).
FeatureMatrix raw_features(const Dataset& d);

/// First `k` columns.
FeatureMatrix leading_columns(const FeatureMatrix& fm, std::size_t k);

/// Rows by index.
FeatureMatrix select_rows(const FeatureMatrix& fm, std::span<const std::size_t> rows);

MinMaxScaling fit_scaling(const FeatureMatrix& fm);

/// (x - min) / (max - min) clamped to [0, 1]; constant columns map to 0.
FeatureMatrix apply_scaling(const FeatureMatrix& fm, const MinMaxScaling& scaling);

/// CSV with the column ids as header and the label name as the last column.
void write_features_csv(std::ostream& out, const FeatureMatrix& fm,
                        const std::vector<std::string>& label_names);

}  // namespace divshap
