#include "divshap/elm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "divshap/error.hpp"
#include "divshap/random.hpp"

namespace divshap {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::HardLimit: return "hardlimit";
  }
  return "sigmoid";
}

Activation activation_from_string(const std::string& name) {
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "tanh") return Activation::Tanh;
  if (name == "hardlimit" || name == "hardlim") return Activation::HardLimit;
  throw Error(ErrorCode::InvalidArgument, "unknown activation '" + name + "'");
}

HiddenLayer HiddenLayer::random(std::size_t inputs, std::size_t hidden, Activation activation,
                                std::uint64_t seed) {
  HiddenLayer layer;
  layer.activation = activation;
  layer.seed = seed;
  layer.weights.resize(static_cast<Eigen::Index>(hidden), static_cast<Eigen::Index>(inputs));
  layer.biases.resize(static_cast<Eigen::Index>(hidden));
  Rng rng(seed);
  for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = rng.uniform(-1.0, 1.0);
  }
  for (Eigen::Index r = 0; r < layer.biases.size(); ++r) layer.biases(r) = rng.uniform(-1.0, 1.0);
  return layer;
}

Eigen::MatrixXd hidden_output(const HiddenLayer& layer, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != layer.inputs()) {
    throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(x.cols()) +
                                                  " columns, layer expects " +
                                                  std::to_string(layer.inputs()));
  }
  Eigen::MatrixXd h = x * layer.weights.transpose();
  h.rowwise() += layer.biases.transpose();
  switch (layer.activation) {
    case Activation::Sigmoid:
      h = h.unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
      break;
    case Activation::Tanh:
      h = h.array().tanh().matrix();
      break;
    case Activation::HardLimit:
      h = h.unaryExpr([](double z) { return z >= 0.0 ? 1.0 : 0.0; });
      break;
  }
  return h;
}

Eigen::MatrixXd pinv_solve(const Eigen::MatrixXd& h, const Eigen::MatrixXd& t, double ridge) {
  if (h.rows() != t.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "H has " + std::to_string(h.rows()) + " rows, T has " +
                                                  std::to_string(t.rows()));
  }
  if (ridge < 0.0) throw Error(ErrorCode::InvalidArgument, "ridge must be non-negative");
  if (!h.allFinite() || !t.allFinite()) throw Error(ErrorCode::NumericalFailure, "non-finite input");

  Eigen::MatrixXd beta;
  if (ridge == 0.0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "SVD did not converge");
    const auto& sigma = svd.singularValues();
    const double top = sigma.size() > 0 ? sigma(0) : 0.0;
    const double cutoff = static_cast<double>(std::max(h.rows(), h.cols())) *
                          std::numeric_limits<double>::epsilon() * top;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      if (sigma(i) > cutoff) inv(i) = 1.0 / sigma(i);
    }
    beta = svd.matrixV() * inv.asDiagonal() * (svd.matrixU().transpose() * t);
  } else {
    Eigen::MatrixXd gram = h.transpose() * h;
    gram.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::NumericalFailure, "ridge system is not positive definite");
    }
    beta = llt.solve(h.transpose() * t);
  }
  if (!beta.allFinite()) throw Error(ErrorCode::NumericalFailure, "non-finite output weights");
  return beta;
}

std::size_t resolve_hidden_nodes(const ElmConfig& cfg, std::size_t samples, std::size_t inputs) {
  if (cfg.hidden_nodes != 0) return cfg.hidden_nodes;
  return std::max<std::size_t>(1, std::min(samples, std::max<std::size_t>(20, 2 * inputs)));
}

ElmModel train_elm(const Eigen::MatrixXd& x, std::span<const int> labels, const ElmConfig& cfg) {
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "label count differs from row count");
  }
  if (labels.empty()) throw Error(ErrorCode::EmptyInput, "no training rows");
  std::vector<int> codebook(labels.begin(), labels.end());
  std::sort(codebook.begin(), codebook.end());
  codebook.erase(std::unique(codebook.begin(), codebook.end()), codebook.end());
  if (codebook.size() < 2) {
    throw Error(ErrorCode::SingleClassTraining, "training labels hold a single class");
  }

  Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(x.rows(), static_cast<Eigen::Index>(codebook.size()));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const auto col = std::lower_bound(codebook.begin(), codebook.end(), labels[r]) - codebook.begin();
    targets(static_cast<Eigen::Index>(r), col) = 1.0;
  }

  ElmModel model;
  const auto hidden = resolve_hidden_nodes(cfg, labels.size(), static_cast<std::size_t>(x.cols()));
  model.hidden = HiddenLayer::random(static_cast<std::size_t>(x.cols()), hidden, cfg.activation, cfg.seed);
  model.beta = pinv_solve(hidden_output(model.hidden, x), targets, cfg.ridge);
  model.codebook = std::move(codebook);
  model.ridge = cfg.ridge;
  return model;
}

Eigen::MatrixXd decision_values(const ElmModel& model, const Eigen::MatrixXd& x) {
  return hidden_output(model.hidden, x) * model.beta;
}

std::vector<int> predict(const ElmModel& model, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd out = decision_values(model, x);
  std::vector<int> labels(static_cast<std::size_t>(out.rows()));
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < out.cols(); ++c) {
      if (out(r, c) > out(r, best)) best = c;
    }
    labels[static_cast<std::size_t>(r)] = model.codebook.at(static_cast<std::size_t>(best));
  }
  return labels;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  Eigen::MatrixXd m(rows, cols);
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows) throw Error(ErrorCode::ModelFormat, "matrix row count");
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = data.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error(ErrorCode::ModelFormat, "matrix column count");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

nlohmann::json to_json(const ElmModel& model) {
  return {
      {"activation", to_string(model.hidden.activation)},
      {"seed", model.hidden.seed},
      {"ridge", model.ridge},
      {"weights", matrix_to_json(model.hidden.weights)},
      {"biases", std::vector<double>(model.hidden.biases.data(),
                                     model.hidden.biases.data() + model.hidden.biases.size())},
      {"beta", matrix_to_json(model.beta)},
      {"codebook", model.codebook},
  };
}

ElmModel elm_from_json(const nlohmann::json& j) {
  ElmModel model;
  model.hidden.activation = activation_from_string(j.at("activation").get<std::string>());
  model.hidden.seed = j.at("seed").get<std::uint64_t>();
  model.hidden.weights = matrix_from_json(j.at("weights"));
  const auto biases = j.at("biases").get<std::vector<double>>();
  model.hidden.biases = Eigen::Map<const Eigen::VectorXd>(biases.data(), static_cast<Eigen::Index>(biases.size()));
  model.beta = matrix_from_json(j.at("beta"));
  model.codebook = j.at("codebook").get<std::vector<int>>();
  model.ridge = j.at("ridge").get<double>();
  if (model.hidden.biases.size() != model.hidden.weights.rows() ||
      model.beta.rows() != model.hidden.weights.rows() ||
      model.beta.cols() != static_cast<Eigen::Index>(model.codebook.size())) {
    throw Error(ErrorCode::ModelFormat, "inconsistent ELM dimensions");
  }
  return model;
}

}  // namespace divshap
