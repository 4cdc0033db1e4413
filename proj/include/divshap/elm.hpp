#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace divshap {

enum class Activation { Sigmoid, Tanh, HardLimit };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// Random input layer: weights (hidden x inputs) and biases drawn uniformly
/// on [-1, 1] from `seed`, never tuned afterwards.
struct HiddenLayer {
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;
  Activation activation = Activation::Sigmoid;
  std::uint64_t seed = 0;

  static HiddenLayer random(std::size_t inputs, std::size_t hidden, Activation activation,
                            std::uint64_t seed);
  std::size_t inputs() const noexcept { return static_cast<std::size_t>(weights.cols()); }
  std::size_t hidden() const noexcept { return static_cast<std::size_t>(weights.rows()); }
};

/// H(j, i) = g(w_i . x_j + b_i) for rows x_j of X.
Eigen::MatrixXd hidden_output(const HiddenLayer& layer, const Eigen::MatrixXd& x);

/// Output weights for H beta ~= T.
///
/// ridge == 0: minimum-norm least squares through a truncated SVD
/// pseudoinverse (singular values below max(N, Ñ) * eps * sigma_max dropped).
/// ridge > 0: (H^T H + ridge I)^-1 H^T T via Cholesky.
/// Throws NumericalFailure when a factorization fails or yields non-finite output.
Eigen::MatrixXd pinv_solve(const Eigen::MatrixXd& h, const Eigen::MatrixXd& t, double ridge);

struct ElmConfig {
  std::size_t hidden_nodes = 0;  ///< 0: min(N, max(20, 2 * inputs))
  Activation activation = Activation::Sigmoid;
  std::uint64_t seed = 1;
  double ridge = 1e-6;
};

/// Hidden width used for N samples of `inputs` features.
std::size_t resolve_hidden_nodes(const ElmConfig& cfg, std::size_t samples, std::size_t inputs);

struct ElmModel {
  HiddenLayer hidden;
  Eigen::MatrixXd beta;        ///< hidden x |codebook|
  std::vector<int> codebook;   ///< output column -> label code
  double ridge = 0.0;
};

/// Trains on rows of `x` with one-hot targets. Throws SingleClassTraining when
/// fewer than two labels are present.
ElmModel train_elm(const Eigen::MatrixXd& x, std::span<const int> labels, const ElmConfig& cfg);

/// Raw network outputs (N x |codebook|).
Eigen::MatrixXd decision_values(const ElmModel& model, const Eigen::MatrixXd& x);

/// Argmax decode; ties resolve to the lowest output column.
std::vector<int> predict(const ElmModel& model, const Eigen::MatrixXd& x);

nlohmann::json to_json(const ElmModel& model);
ElmModel elm_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

}  // namespace divshap
