// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.
//
// UCR data is looked up in the bundled test corpus and in $DIVSHAP_UCR_DIR
// (flat <Name>_TRAIN.{tsv,txt} files or the archive's <Name>/ subdirectories).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "divshap/bench.hpp"
#include "divshap/error.hpp"
#include "divshap/mining.hpp"
#include "divshap/parallel.hpp"
#include "divshap/pipeline.hpp"
#include "divshap/random.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace divshap;
using Clock = std::chrono::steady_clock;

namespace {

// pinned tolerances and budgets
constexpr double kSplitGainTol = 1e-12;
constexpr double kSplitBudgetSec = 10.0;
constexpr double kDistRelTol = 1e-9;
constexpr double kDistBudgetSec = 5.0;
constexpr double kInterpTol = 1e-4;
constexpr double kInterpPassRate = 0.95;
constexpr int kInterpTrials = 100;
constexpr Eigen::Index kInterpInputs = 10;
constexpr double kNormalEqTol = 1e-8;
constexpr double kPerturbSlack = 1e-10;
constexpr double kPerturbStep = 1e-3;
constexpr double kCoffeeNnFloor = 0.90;
constexpr double kSonyNnSlack = 0.02;
constexpr double kRunBudgetSec = 300.0;
constexpr int kImproveSeeds = 5;
constexpr int kImproveNeeded = 3;
constexpr std::size_t kDefaultKappa = 9;
constexpr int kTimingReps = 200;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string num(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
  std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << ". " << title << " -- " << o.detail << std::endl;
  if (!o.pass) ++failures;
}

// ---------------------------------------------------------------- data

std::vector<fs::path> search_dirs() {
  std::vector<fs::path> dirs{DIVSHAP_DATA_DIR};
  if (const char* env = std::getenv("DIVSHAP_UCR_DIR"); env && *env) dirs.emplace_back(env);
  return dirs;
}

std::optional<std::pair<fs::path, fs::path>> find_split(const std::vector<std::string>& names) {
  for (const auto& dir : search_dirs()) {
    for (const auto& name : names) {
      for (const auto& base : {dir, dir / name}) {
        for (const char* ext : {".tsv", ".txt", ""}) {
          const auto train = base / (name + "_TRAIN" + ext);
          const auto test = base / (name + "_TEST" + ext);
          if (fs::is_regular_file(train) && fs::is_regular_file(test)) return std::make_pair(train, test);
        }
      }
    }
  }
  return std::nullopt;
}

struct Corpus {
  std::string name;
  Dataset train, test;
  std::vector<ScoredCandidate> mined;
  double mining_seconds = 0.0;
};

std::map<std::string, std::optional<Corpus>> cache;

const std::map<std::string, std::vector<std::string>> kAliases = {
    {"Coffee", {"Coffee"}},
    {"ECGFiveDays", {"ECGFiveDays"}},
    {"SonyAIBORobot", {"SonyAIBORobotSurface1", "SonyAIBORobotSurface", "SonyAIBORobot"}},
    {"TwoLeadECG", {"TwoLeadECG"}},
};

const Corpus* corpus(const std::string& key) {
  if (auto it = cache.find(key); it != cache.end()) return it->second ? &*it->second : nullptr;
  auto& slot = cache[key];
  const auto paths = find_split(kAliases.at(key));
  if (!paths) return nullptr;
  Corpus c;
  c.name = key;
  auto [train, test] = harmonize_labels(load_ucr(paths->first), load_ucr(paths->second));
  c.train = std::move(train);
  c.test = std::move(test);
  PipelineConfig cfg;
  cfg.workers = default_workers();
  MiningConfig mining = cfg.mining;
  mining.workers = cfg.workers;
  const auto t = Clock::now();
  c.mined = mine_scored(c.train, mining);
  c.mining_seconds = since(t);
  slot = std::move(c);
  return &*slot;
}

PipelineConfig default_config(std::uint64_t seed = 1) {
  PipelineConfig cfg;
  cfg.workers = default_workers();
  cfg.elm.seed = seed;
  cfg.eval.seed = seed;
  return cfg;
}

// ---------------------------------------------------------------- criteria

Outcome split_oracle() {
  const auto t = Clock::now();
  std::mt19937_64 gen(20240611);
  std::size_t orderlines = 0, mismatches = 0;
  double worst = 0.0;
  for (int ds = 0; ds < 200; ++ds) {
    const int classes = 2 + static_cast<int>(gen() % 2);
    const std::size_t n = static_cast<std::size_t>(classes) + gen() % (13 - static_cast<std::size_t>(classes));
    const std::size_t m = 6 + gen() % 19;
    const auto d = toy::random_dataset(gen(), n, m, classes, 0.5 + static_cast<double>(gen() % 3));
    MiningConfig cfg;
    cfg.min_len = 3;
    cfg.max_len = m / 2;
    for (const auto& ref : enumerate_candidates(d, cfg)) {
      const auto& src = d.series[ref.series].values;
      const std::vector<double> s(src.begin() + static_cast<std::ptrdiff_t>(ref.start),
                                  src.begin() + static_cast<std::ptrdiff_t>(ref.start + ref.length));
      const auto ol = orderline(s, d, DistanceConfig{});
      const auto got = best_split(ol, d.label_names.size());
      std::vector<double> dist;
      std::vector<int> labels;
      for (const auto& e : ol) {
        dist.push_back(e.distance);
        labels.push_back(e.label);
      }
      const auto want = oracle::best_split(dist, labels, kGainTieTolerance);
      std::size_t left = 0;
      for (double v : dist) left += v <= got.threshold;
      const double delta = std::abs(got.gain - want.gain);
      worst = std::max(worst, delta);
      if (delta > kSplitGainTol || (!got.degenerate && left != want.left_size)) ++mismatches;
      ++orderlines;
    }
  }
  const double secs = since(t);
  return {mismatches == 0 && secs < kSplitBudgetSec,
          "200 datasets, " + std::to_string(orderlines) + " orderlines, " + std::to_string(mismatches) +
              " mismatches, max |dgain| " + num(worst) + ", " + num(secs, 3) + " s (budget " +
              num(kSplitBudgetSec) + " s)"};
}

Outcome distance_oracle() {
  const auto t = Clock::now();
  std::mt19937_64 gen(777);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  std::size_t bad = 0;
  for (int pair = 0; pair < 500; ++pair) {
    const std::size_t m = 8 + gen() % 121;
    const std::size_t len = 2 + gen() % (m - 1);
    std::vector<double> series(m), query(len);
    // random walks give windows that are neither trivially close nor far
    double a = 0.0, b = 0.0;
    for (auto& v : series) v = a += g(gen);
    for (auto& v : query) v = b += g(gen);
    const DistanceConfig cfg{pair % 4 != 3, pair % 5 != 4};
    const double want = oracle::subsequence_dist(series, query, cfg.normalize_windows, cfg.length_normalize);
    const double got = subsequence_dist(series, query, cfg);
    const double rel = std::abs(got - want) / std::max(std::abs(want), 1e-300);
    const double err = want == 0.0 ? std::abs(got) : rel;
    worst = std::max(worst, err);
    if (err > kDistRelTol) ++bad;
  }
  const double secs = since(t);
  return {bad == 0 && secs < kDistBudgetSec, "500 pairs, " + std::to_string(bad) + " outside tolerance, max rel err " +
                                                  num(worst) + ", " + num(secs, 3) + " s (budget " +
                                                  num(kDistBudgetSec) + " s)"};
}

Outcome independence() {
  std::size_t models = 0, pairs = 0, violations = 0, prefix_breaks = 0;
  std::vector<std::string> used;
  for (const auto& key : {"Coffee", "ECGFiveDays", "SonyAIBORobot", "TwoLeadECG"}) {
    const auto* c = corpus(key);
    if (!c) continue;
    used.push_back(key);
    const auto cfg = default_config();
    const auto model = fit_with_candidates(c->train, c->mined, cfg);
    ++models;
    for (std::size_t i = 0; i < model.shapelets.size(); ++i) {
      for (std::size_t j = i + 1; j < model.shapelets.size(); ++j) {
        ++pairs;
        violations += similar(model.shapelets[i], model.shapelets[j], cfg.distance, cfg.same_class_only);
      }
    }
    const LazyDiversityGraph g(c->train, c->mined, GraphConfig{cfg.distance, cfg.same_class_only, 1});
    auto prev = div_topk_indices(g, 1);
    for (std::size_t k = 2; k <= 2 * cfg.kappa; ++k) {
      const auto cur = div_topk_indices(g, k);
      if (cur.size() < prev.size() || !std::equal(prev.begin(), prev.end(), cur.begin())) ++prefix_breaks;
      prev = cur;
    }
    for (std::size_t i = 0; i < model.shapelets.size(); ++i) {
      if (model.shapelets[i].values != g.vertex(prev[i]).values) ++prefix_breaks;
    }
  }
  std::string names;
  for (const auto& n : used) names += (names.empty() ? "" : ",") + n;
  return {models > 0 && violations == 0 && prefix_breaks == 0,
          std::to_string(models) + " fitted models (" + names + "), " + std::to_string(pairs) +
              " selected pairs, " + std::to_string(violations) + " similar, " + std::to_string(prefix_breaks) +
              " prefix violations"};
}

Outcome interpolation() {
  std::ostringstream detail;
  bool pass = true;
  for (std::size_t n : {5, 20, 50}) {
    int good = 0, failures_raised = 0;
    double worst = 0.0;
    for (int trial = 0; trial < kInterpTrials; ++trial) {
      std::mt19937_64 gen(mix_seed(n, static_cast<std::uint64_t>(trial)));
      std::normal_distribution<double> g(0.0, 1.0);
      Eigen::MatrixXd x(static_cast<Eigen::Index>(n), kInterpInputs);
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(gen);
      std::vector<int> labels;
      for (std::size_t i = 0; i < n; ++i) labels.push_back(static_cast<int>(i % 3));
      ElmConfig cfg;
      cfg.hidden_nodes = n;
      cfg.ridge = 0.0;
      cfg.seed = static_cast<std::uint64_t>(trial) + 1;
      try {
        const auto model = train_elm(x, labels, cfg);
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 3);
        for (std::size_t i = 0; i < n; ++i) t(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
        const double err = (decision_values(model, x) - t).cwiseAbs().maxCoeff();
        worst = std::max(worst, err);
        good += err <= kInterpTol;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NumericalFailure) throw;
        ++failures_raised;
      }
    }
    const double rate = static_cast<double>(good) / kInterpTrials;
    pass = pass && rate >= kInterpPassRate;
    detail << "N=" << n << ": " << good << "/" << kInterpTrials << " (max err " << num(worst, 3) << ", "
           << failures_raised << " raised) ";
  }
  return {pass, detail.str()};
}

Outcome pinv_contract() {
  std::mt19937_64 gen(4242);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst_resid = 0.0, worst_gain = -1.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 4 + static_cast<Eigen::Index>(gen() % 9);
    const Eigen::Index hidden = 1 + static_cast<Eigen::Index>(gen() % static_cast<std::uint64_t>(n));
    const Eigen::Index c = 1 + static_cast<Eigen::Index>(gen() % 4);
    Eigen::MatrixXd h(n, hidden), t(n, c);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = g(gen);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = g(gen);
    const auto beta = pinv_solve(h, t, 0.0);
    const Eigen::MatrixXd resid = h.transpose() * h * beta - h.transpose() * t;
    worst_resid = std::max(worst_resid, resid.cwiseAbs().maxCoeff());
    const double base = (h * beta - t).norm();
    for (int p = 0; p < 20; ++p) {
      Eigen::MatrixXd dir(hidden, c);
      for (Eigen::Index i = 0; i < dir.size(); ++i) dir.data()[i] = g(gen);
      dir *= kPerturbStep / dir.norm();
      worst_gain = std::max(worst_gain, base - (h * (beta + dir) - t).norm());
    }
  }
  return {worst_resid <= kNormalEqTol && worst_gain <= kPerturbSlack,
          "100 instances, max normal-equation residual " + num(worst_resid, 3) + " (tol " + num(kNormalEqTol) +
              "), max residual reduction under perturbation " + num(worst_gain, 3) + " (slack " +
              num(kPerturbSlack) + ")"};
}

std::optional<ExperimentReport> compare_on(const Corpus& c, std::uint64_t seed) {
  return run_compare(c.train, c.test, default_config(seed), &c.mined);
}

Outcome transformed_nn() {
  std::ostringstream detail;
  bool pass = true;
  if (const auto* c = corpus("Coffee")) {
    const auto t = Clock::now();
    const auto r = compare_on(*c, 1);
    const double secs = since(t) + c->mining_seconds;
    const bool ok = *r->transformed_1nn >= kCoffeeNnFloor && secs < kRunBudgetSec;
    pass = pass && ok;
    detail << "Coffee: 1NN(S) " << num(*r->transformed_1nn) << " (floor " << kCoffeeNnFloor << "), raw 1NN "
           << num(*r->raw_1nn) << ", " << num(secs, 3) << " s; ";
  } else {
    pass = false;
    detail << "Coffee: dataset unavailable; ";
  }
  if (const auto* c = corpus("SonyAIBORobot")) {
    const auto t = Clock::now();
    const auto r = compare_on(*c, 1);
    const double secs = since(t) + c->mining_seconds;
    const bool ok = *r->transformed_1nn >= *r->raw_1nn - kSonyNnSlack && secs < kRunBudgetSec;
    pass = pass && ok;
    detail << "SonyAIBORobot: 1NN(S) " << num(*r->transformed_1nn) << " vs raw " << num(*r->raw_1nn) << " - "
           << kSonyNnSlack << ", " << num(secs, 3) << " s";
  } else {
    pass = false;
    detail << "SonyAIBORobot: dataset unavailable (set DIVSHAP_UCR_DIR)";
  }
  return {pass, detail.str()};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::vector<ExperimentReport> seeded_reports;

Outcome elm_improvement() {
  int improved = 0;
  std::ostringstream detail;
  for (const auto& key : {"Coffee", "ECGFiveDays", "SonyAIBORobot", "TwoLeadECG"}) {
    const auto* c = corpus(key);
    if (!c) {
      detail << key << ": unavailable; ";
      continue;
    }
    std::vector<double> div, raw;
    for (int s = 1; s <= kImproveSeeds; ++s) {
      const auto r = compare_on(*c, static_cast<std::uint64_t>(s));
      div.push_back(*r->divshap_elm);
      raw.push_back(*r->raw_elm);
      seeded_reports.push_back(*r);
    }
    const bool better = median(div) > median(raw);
    improved += better;
    detail << key << ": median DivShapELM " << num(median(div)) << " vs ELM " << num(median(raw))
           << (better ? " (better); " : " (not better); ");
  }
  detail << improved << "/4 improved, need " << kImproveNeeded;
  return {improved >= kImproveNeeded, detail.str()};
}

Outcome k_bound() {
  std::size_t models = 0, out_of_range = 0, bad_csv = 0;
  for (const auto& r : seeded_reports) {
    ++models;
    out_of_range += r.selected_k < 1 || r.selected_k > kDefaultKappa;
  }
  for (const auto& key : {"Coffee", "ECGFiveDays", "SonyAIBORobot", "TwoLeadECG"}) {
    const auto* c = corpus(key);
    if (!c) continue;
    const auto model = fit_with_candidates(c->train, c->mined, default_config());
    ++models;
    out_of_range += model.selected_k < 1 || model.selected_k > kDefaultKappa;
    ExperimentReport r;
    r.sweep = model.sweep;
    std::ostringstream csv;
    write_sweep_csv(csv, r);
    const auto text = csv.str();
    const auto rows = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;
    const std::size_t evaluated = std::min(kDefaultKappa, model.diversified.size());
    bad_csv += rows != evaluated || model.sweep.size() != evaluated;
  }
  return {models > 0 && out_of_range == 0 && bad_csv == 0,
          std::to_string(models) + " fitted models, " + std::to_string(out_of_range) +
              " with selected_k outside [1, 9], " + std::to_string(bad_csv) + " sweep CSVs with wrong row count"};
}

Outcome predict_time() {
  const Corpus* c = corpus("Coffee");
  if (!c) return {false, "Coffee (m >= 128) unavailable"};
  if (c->train.length < 128) return {false, "series length below 128"};
  const auto cfg = default_config();
  const auto model = fit_with_candidates(c->train, c->mined, cfg);
  const auto x_div = model_features(model, c->test);

  const auto raw_train = raw_features(c->train);
  const auto scaling = fit_scaling(raw_train);
  const auto x_train = apply_scaling(raw_train, scaling);
  const auto raw_model = train_elm(x_train.values, x_train.labels, cfg.elm);
  const auto x_raw = apply_scaling(raw_features(c->test), scaling);

  std::size_t sink = 0;
  auto time_reps = [&](const ElmModel& m, const Eigen::MatrixXd& x) {
    const auto t = Clock::now();
    for (int rep = 0; rep < kTimingReps; ++rep) sink += static_cast<std::size_t>(predict(m, x).front());
    return since(t);
  };
  // interleave a warm-up of each before timing
  time_reps(model.elm, x_div.values);
  time_reps(raw_model, x_raw.values);
  const double div_secs = time_reps(model.elm, x_div.values);
  const double raw_secs = time_reps(raw_model, x_raw.values);
  return {div_secs <= raw_secs,
          "Coffee m=" + std::to_string(c->train.length) + ", k=" + std::to_string(model.selected_k) + ", " +
              std::to_string(kTimingReps) + " reps: transformed " + num(div_secs * 1e3, 3) + " ms vs raw " +
              num(raw_secs * 1e3, 3) + " ms"};
}

Outcome determinism() {
  std::size_t runs = 0, diffs = 0;
  std::string names;
  for (const auto& key : {"ECGFiveDays", "Coffee"}) {
    const auto* c = corpus(key);
    if (!c) continue;
    names += std::string(names.empty() ? "" : ",") + key;
    // full compare runs, mining included
    const auto a = to_json(run_compare(c->train, c->test, default_config()));
    const auto b = to_json(run_compare(c->train, c->test, default_config()));
    runs += 2;
    diffs += a["accuracy"].dump() != b["accuracy"].dump();
    diffs += a["selected_k"].dump() != b["selected_k"].dump();
    diffs += a["sweep"].dump() != b["sweep"].dump();
  }
  return {runs > 0 && diffs == 0,
          std::to_string(runs) + " compare runs (" + names + "), " + std::to_string(diffs) + " differing fields"};
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"split scoring matches exhaustive thresholds", split_oracle},
      {"early-abandoning distance matches naive scan", distance_oracle},
      {"selected shapelets independent, top-k prefix-monotone", independence},
      {"ELM interpolates N samples with N hidden nodes", interpolation},
      {"pseudoinverse solves the normal equations", pinv_contract},
      {"shapelet-transformed 1NN on Coffee / SonyAIBORobot", transformed_nn},
      {"DivShapELM beats raw ELM on 3 of 4 datasets", elm_improvement},
      {"1 <= selected_k <= 9 and one sweep row per k", k_bound},
      {"transformed ELM predicts no slower than raw", predict_time},
      {"compare is deterministic", determinism},
  };
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    report(static_cast<int>(i + 1), criteria[i].first, o);
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria passed in " << num(since(start), 3) << " s" << std::endl;
  return failures == 0 ? 0 : 1;
}
