#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "divshap/elm.hpp"
#include "divshap/error.hpp"
#include "oracles.hpp"

using namespace divshap;
using Eigen::MatrixXd;

namespace {

MatrixXd random_matrix(std::mt19937_64& gen, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = g(gen);
  return m;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected divshap::Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("hidden_output examples") {
  HiddenLayer zero;
  zero.weights = MatrixXd::Zero(3, 2);
  zero.biases = Eigen::VectorXd::Zero(3);
  const auto h = hidden_output(zero, MatrixXd::Random(4, 2));
  CHECK(h.rows() == 4);
  CHECK(h.cols() == 3);
  CHECK((h.array() == 0.5).all());

  HiddenLayer one;
  one.weights = MatrixXd::Ones(1, 1);
  one.biases = Eigen::VectorXd::Zero(1);
  CHECK(hidden_output(one, MatrixXd::Zero(1, 1))(0, 0) == 0.5);
  CHECK(code_of([&] { hidden_output(one, MatrixXd::Zero(1, 2)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("hidden_output matches the scalar formula") {
  std::mt19937_64 gen(3);
  const auto layer = HiddenLayer::random(5, 7, Activation::Sigmoid, 42);
  CHECK(layer.weights.minCoeff() >= -1.0);
  CHECK(layer.weights.maxCoeff() <= 1.0);
  CHECK(layer.biases.cwiseAbs().maxCoeff() <= 1.0);
  const auto x = random_matrix(gen, 6, 5);
  const auto h = hidden_output(layer, x);
  for (Eigen::Index j = 0; j < 6; ++j) {
    for (Eigen::Index i = 0; i < 7; ++i) {
      double z = layer.biases(i);
      for (Eigen::Index f = 0; f < 5; ++f) z += layer.weights(i, f) * x(j, f);
      CHECK(std::abs(h(j, i) - oracle::sigmoid(z)) <= 1e-12);
    }
  }
}

TEST_CASE("pinv_solve examples") {
  const MatrixXd t = (MatrixXd(2, 3) << 1, -2, 3, 0.5, 7, -1).finished();
  CHECK((pinv_solve(MatrixXd::Identity(2, 2), t, 0.0) - t).cwiseAbs().maxCoeff() <= 1e-15);
  const MatrixXd h = (MatrixXd(2, 1) << 1, 1).finished();
  const MatrixXd tt = (MatrixXd(2, 1) << 0, 2).finished();
  CHECK(pinv_solve(h, tt, 0.0)(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("pinv_solve satisfies the normal equations") {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = random_matrix(gen, 6, 4);
    const auto t = random_matrix(gen, 6, 3);
    const auto beta = pinv_solve(h, t, 0.0);
    const MatrixXd resid = h.transpose() * h * beta - h.transpose() * t;
    CHECK(resid.cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("pinv_solve is minimum norm on rank-deficient input") {
  std::mt19937_64 gen(12);
  auto h = random_matrix(gen, 5, 4);
  h.col(3) = h.col(0) + h.col(1);
  const auto t = random_matrix(gen, 5, 2);
  const auto beta = pinv_solve(h, t, 0.0);
  // the minimum-norm solution lies in the row space of H
  Eigen::VectorXd null(4);
  null << 1, 1, 0, -1;
  CHECK((null.transpose() * beta).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("ridge solution matches the closed form and shrinks with lambda") {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = random_matrix(gen, 8, 5);
    const auto t = random_matrix(gen, 8, 2);
    double last = std::numeric_limits<double>::infinity();
    for (double lambda : {1e-6, 1e-3, 1e-1, 1.0, 10.0}) {
      const auto beta = pinv_solve(h, t, lambda);
      const MatrixXd gram = h.transpose() * h + lambda * MatrixXd::Identity(5, 5);
      const MatrixXd want = gram.inverse() * h.transpose() * t;
      CHECK((beta - want).cwiseAbs().maxCoeff() <= 1e-9);
      CHECK(beta.norm() <= last);
      last = beta.norm();
    }
  }
  CHECK(code_of([] { pinv_solve(MatrixXd::Ones(2, 2), MatrixXd::Ones(3, 1), 0.0); }) ==
        ErrorCode::DimensionMismatch);
  MatrixXd bad = MatrixXd::Ones(2, 2);
  bad(0, 0) = std::nan("");
  CHECK(code_of([&] { pinv_solve(bad, MatrixXd::Ones(2, 1), 0.0); }) == ErrorCode::NumericalFailure);
}

TEST_CASE("least squares: random perturbations never lower the residual") {
  std::mt19937_64 gen(14);
  for (int trial = 0; trial < 30; ++trial) {
    const auto h = random_matrix(gen, 10, 4);
    const auto t = random_matrix(gen, 10, 2);
    const auto beta = pinv_solve(h, t, 0.0);
    const double base = (h * beta - t).norm();
    for (int p = 0; p < 20; ++p) {
      MatrixXd dir = random_matrix(gen, 4, 2);
      dir /= dir.norm();
      CHECK((h * (beta + 1e-3 * dir) - t).norm() >= base - 1e-10);
    }
  }
}

TEST_CASE("two distinct points are interpolated") {
  const MatrixXd x = (MatrixXd(2, 1) << -0.7, 0.4).finished();
  const std::vector<int> labels{1, 0};
  ElmConfig cfg;
  cfg.hidden_nodes = 2;
  cfg.ridge = 0.0;
  const auto model = train_elm(x, labels, cfg);
  CHECK(predict(model, x) == labels);
  const auto out = decision_values(model, x);
  MatrixXd t = MatrixXd::Zero(2, 2);
  t(0, 1) = 1.0;
  t(1, 0) = 1.0;
  CHECK((out - t).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("conflicting duplicates still train") {
  const MatrixXd x = (MatrixXd(3, 2) << 1, 1, 1, 1, 0, 0).finished();
  const std::vector<int> labels{0, 1, 0};
  ElmConfig cfg;
  cfg.ridge = 0.0;
  const auto model = train_elm(x, labels, cfg);
  const auto out = decision_values(model, x.topRows(1));
  CHECK(std::abs(out(0, 0) - 0.5) <= 1e-6);
  CHECK(std::abs(out(0, 1) - 0.5) <= 1e-6);
}

TEST_CASE("training is deterministic for a fixed seed") {
  std::mt19937_64 gen(15);
  const auto x = random_matrix(gen, 20, 4);
  std::vector<int> labels;
  for (int i = 0; i < 20; ++i) labels.push_back(i % 3);
  const auto a = train_elm(x, labels, ElmConfig{});
  const auto b = train_elm(x, labels, ElmConfig{});
  CHECK(a.beta == b.beta);
  CHECK(a.hidden.weights == b.hidden.weights);
  ElmConfig other;
  other.seed = 2;
  CHECK(train_elm(x, labels, other).hidden.weights != a.hidden.weights);
}

TEST_CASE("argmax tie rule and positive scale invariance") {
  std::mt19937_64 gen(16);
  const auto x = random_matrix(gen, 15, 3);
  std::vector<int> labels;
  for (int i = 0; i < 15; ++i) labels.push_back(2 + i % 3);
  auto model = train_elm(x, labels, ElmConfig{});
  const auto base = predict(model, x);
  auto scaled = model;
  scaled.beta *= 3.0;
  CHECK(predict(scaled, x) == base);
  auto zero = model;
  zero.beta.setZero();
  for (int l : predict(zero, x)) CHECK(l == 2);
  CHECK(code_of([&] { predict(model, random_matrix(gen, 2, 4)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("single class and hidden width rule") {
  const MatrixXd x = MatrixXd::Random(4, 2);
  CHECK(code_of([&] { train_elm(x, std::vector<int>{1, 1, 1, 1}, ElmConfig{}); }) ==
        ErrorCode::SingleClassTraining);
  CHECK(resolve_hidden_nodes(ElmConfig{}, 100, 3) == 20);
  CHECK(resolve_hidden_nodes(ElmConfig{}, 100, 30) == 60);
  CHECK(resolve_hidden_nodes(ElmConfig{}, 12, 30) == 12);
  ElmConfig fixed;
  fixed.hidden_nodes = 7;
  CHECK(resolve_hidden_nodes(fixed, 100, 30) == 7);
}

TEST_CASE("interpolation with as many hidden nodes as samples") {
  std::mt19937_64 gen(17);
  for (std::size_t n : {5, 20, 50}) {
    int good = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const auto x = random_matrix(gen, static_cast<Eigen::Index>(n), 10);
      std::vector<int> labels;
      for (std::size_t i = 0; i < n; ++i) labels.push_back(static_cast<int>(i % 3));
      ElmConfig cfg;
      cfg.hidden_nodes = n;
      cfg.ridge = 0.0;
      cfg.seed = static_cast<std::uint64_t>(trial);
      const auto model = train_elm(x, labels, cfg);
      MatrixXd t = MatrixXd::Zero(static_cast<Eigen::Index>(n), 3);
      for (std::size_t i = 0; i < n; ++i) t(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
      good += (decision_values(model, x) - t).cwiseAbs().maxCoeff() <= 1e-4;
    }
    CHECK(good >= 19);
  }
}

TEST_CASE("json round trip preserves predictions bitwise") {
  std::mt19937_64 gen(18);
  const auto x = random_matrix(gen, 12, 3);
  std::vector<int> labels;
  for (int i = 0; i < 12; ++i) labels.push_back(i % 2);
  ElmConfig cfg;
  cfg.activation = Activation::Tanh;
  const auto model = train_elm(x, labels, cfg);
  const auto back = elm_from_json(nlohmann::json::parse(to_json(model).dump()));
  CHECK(back.beta == model.beta);
  CHECK(back.hidden.weights == model.hidden.weights);
  CHECK(back.hidden.activation == Activation::Tanh);
  CHECK(decision_values(back, x) == decision_values(model, x));
}
