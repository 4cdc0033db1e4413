#include "divshap/bench.hpp"

#include <chrono>
#include <iomanip>
#include <limits>

#include "divshap/error.hpp"

namespace divshap {

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  Stopwatch() : start_(Clock::now()) {}
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  Clock::time_point start_;
};

std::string fmt(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os << std::setprecision(17) << *v;
  return os.str();
}

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string dataset_name(const std::string& stem) {
  const std::string suffix = "_TRAIN";
  if (stem.size() > suffix.size() && stem.ends_with(suffix)) return stem.substr(0, stem.size() - suffix.size());
  return stem;
}

std::string composition(const SweepEntry& e) {
  std::string out;
  for (std::size_t c = 0; c < e.class_composition.size(); ++c) {
    if (c) out += ';';
    out += std::to_string(e.class_composition[c]);
  }
  return out;
}

}  // namespace

LabeledSamples raw_samples(const Dataset& d) {
  const auto fm = raw_features(d);
  return {fm.values, fm.labels, SampleKind::RawSeries};
}

LabeledSamples transformed_samples(const FeatureMatrix& fm) {
  return {fm.values, fm.labels, SampleKind::Transformed};
}

std::vector<int> nn_predict(const LabeledSamples& train, const LabeledSamples& test) {
  if (train.kind != test.kind) throw Error(ErrorCode::KindMismatch, "train and test representations differ");
  if (train.x.rows() == 0) throw Error(ErrorCode::EmptyInput, "1NN needs at least one training sample");
  if (train.x.cols() != test.x.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "train has " + std::to_string(train.x.cols()) +
                                                  " columns, test has " + std::to_string(test.x.cols()));
  }
  std::vector<int> out(static_cast<std::size_t>(test.x.rows()));
  for (Eigen::Index q = 0; q < test.x.rows(); ++q) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index arg = 0;
    for (Eigen::Index i = 0; i < train.x.rows(); ++i) {
      const double d = (train.x.row(i) - test.x.row(q)).squaredNorm();
      if (d < best) {
        best = d;
        arg = i;
      }
    }
    out[static_cast<std::size_t>(q)] = train.labels[static_cast<std::size_t>(arg)];
  }
  return out;
}

double baseline_1nn(const LabeledSamples& train, const LabeledSamples& test) {
  return accuracy(nn_predict(train, test), test.labels);
}

ExperimentReport run_compare(const Dataset& train_in, const Dataset& test_in, const PipelineConfig& cfg,
                             const std::vector<ScoredCandidate>* mined) {
  Stopwatch total;
  auto [train, test] = harmonize_labels(train_in, test_in);
  ExperimentReport r;
  r.dataset = dataset_name(train.name);
  r.train_size = train.size();
  r.test_size = test.size();
  r.series_length = train.length;
  r.config = cfg;

  // raw-series ELM on min-max scaled samples
  {
    Stopwatch sw;
    const auto raw_train = raw_features(train);
    const auto scaling = fit_scaling(raw_train);
    const auto x_train = apply_scaling(raw_train, scaling);
    const auto model = train_elm(x_train.values, x_train.labels, cfg.elm);
    r.timings.train_elm = sw.seconds();
    if (!test.empty()) {
      const auto x_test = apply_scaling(raw_features(test), scaling);
      Stopwatch classify;
      const auto labels = predict(model, x_test.values);
      r.timings.classify_elm = classify.seconds();
      r.raw_elm = accuracy(labels, x_test.labels);
    }
  }

  FitTimings ft;
  PipelineModel model;
  if (mined) {
    model = fit_with_candidates(train, *mined, cfg, &ft);
  } else {
    model = fit(train, cfg, &ft);
  }
  r.timings.candidate_selection = ft.candidate_selection;
  r.timings.diversified_selection = ft.diversified_selection;
  r.timings.final_training = ft.final_training;
  r.selected_k = model.selected_k;
  r.candidate_count = model.candidate_count;
  r.sweep = model.sweep;
  r.sweep_test_accuracy.assign(r.sweep.size(), std::nullopt);

  if (!test.empty()) {
    Stopwatch sw;
    const auto x_test = model_features(model, test);
    r.timings.transform = sw.seconds();
    Stopwatch classify;
    const auto labels = predict(model.elm, x_test.values);
    r.timings.classify_divshap = classify.seconds();
    r.divshap_elm = accuracy(labels, x_test.labels);

    // 1NN on the full diversified set, scaled on train
    Stopwatch nn;
    r.raw_1nn = baseline_1nn(raw_samples(train), raw_samples(test));
    const auto t_train = transform(train, model.diversified, cfg.distance, cfg.workers);
    const auto t_test = transform(test, model.diversified, cfg.distance, cfg.workers);
    const auto scaling = fit_scaling(t_train);
    r.transformed_1nn = baseline_1nn(transformed_samples(apply_scaling(t_train, scaling)),
                                     transformed_samples(apply_scaling(t_test, scaling)));
    r.timings.nn = nn.seconds();
  }
  r.timings.total = total.seconds();
  return r;
}

ExperimentReport run_sweep(const Dataset& train_in, const Dataset& test_in, const PipelineConfig& cfg) {
  Stopwatch total;
  auto [train, test] = harmonize_labels(train_in, test_in);
  ExperimentReport r;
  r.dataset = dataset_name(train.name);
  r.train_size = train.size();
  r.test_size = test.size();
  r.series_length = train.length;
  r.config = cfg;

  FitTimings ft;
  const auto model = fit(train, cfg, &ft);
  r.timings.candidate_selection = ft.candidate_selection;
  r.timings.diversified_selection = ft.diversified_selection;
  r.timings.final_training = ft.final_training;
  r.selected_k = model.selected_k;
  r.candidate_count = model.candidate_count;
  r.sweep = model.sweep;
  r.sweep_test_accuracy.assign(r.sweep.size(), std::nullopt);

  if (!test.empty()) {
    Stopwatch sw;
    const auto t_train = transform(train, model.diversified, cfg.distance, cfg.workers);
    const auto t_test = transform(test, model.diversified, cfg.distance, cfg.workers);
    r.timings.transform = sw.seconds();
    for (std::size_t i = 0; i < r.sweep.size(); ++i) {
      const std::size_t k = r.sweep[i].k;
      const auto tr = leading_columns(t_train, k);
      const auto scaling = fit_scaling(tr);
      const auto x_train = apply_scaling(tr, scaling);
      const auto x_test = apply_scaling(leading_columns(t_test, k), scaling);
      const auto elm = train_elm(x_train.values, x_train.labels, cfg.elm);
      r.sweep_test_accuracy[i] = accuracy(predict(elm, x_test.values), x_test.labels);
      if (k == model.selected_k) r.divshap_elm = r.sweep_test_accuracy[i];
    }
  }
  r.timings.total = total.seconds();
  return r;
}

nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json sweep = nlohmann::json::array();
  for (std::size_t i = 0; i < r.sweep.size(); ++i) {
    sweep.push_back({{"k", r.sweep[i].k},
                     {"cv_accuracy", r.sweep[i].accuracy},
                     {"test_accuracy", i < r.sweep_test_accuracy.size() ? opt(r.sweep_test_accuracy[i]) : nullptr},
                     {"class_composition", r.sweep[i].class_composition}});
  }
  const auto& t = r.timings;
  return {
      {"dataset", r.dataset},
      {"train_size", r.train_size},
      {"test_size", r.test_size},
      {"series_length", r.series_length},
      {"accuracy",
       {{"raw_elm", opt(r.raw_elm)},
        {"divshap_elm", opt(r.divshap_elm)},
        {"raw_1nn", opt(r.raw_1nn)},
        {"transformed_1nn", opt(r.transformed_1nn)}}},
      {"selected_k", r.selected_k},
      {"candidate_count", r.candidate_count},
      {"seeds", {{"elm", r.config.elm.seed}, {"eval", r.config.eval.seed}, {"sax", r.config.mining.sax.seed}}},
      {"timings",
       {{"candidate_selection", t.candidate_selection},
        {"diversified_selection", t.diversified_selection},
        {"final_training", t.final_training},
        {"transform", t.transform},
        {"classify_divshap", t.classify_divshap},
        {"train_elm", t.train_elm},
        {"classify_elm", t.classify_elm},
        {"nn", t.nn},
        {"total", t.total}}},
      {"sweep", std::move(sweep)},
      {"config", to_json(r.config)},
  };
}

void write_report_json(std::ostream& out, const ExperimentReport& r) { out << to_json(r).dump(2) << '\n'; }

void write_report_csv(std::ostream& out, const ExperimentReport& r) {
  const auto& t = r.timings;
  out << "dataset,raw_elm,divshap_elm,raw_1nn,transformed_1nn,selected_k,candidate_selection,"
         "diversified_selection,final_training,transform,classify_divshap,train_elm,classify_elm,nn,total\n";
  out << r.dataset << ',' << fmt(r.raw_elm) << ',' << fmt(r.divshap_elm) << ',' << fmt(r.raw_1nn) << ','
      << fmt(r.transformed_1nn) << ',' << r.selected_k << ',' << t.candidate_selection << ','
      << t.diversified_selection << ',' << t.final_training << ',' << t.transform << ',' << t.classify_divshap
      << ',' << t.train_elm << ',' << t.classify_elm << ',' << t.nn << ',' << t.total << '\n';
}

void print_report_table(std::ostream& out, const ExperimentReport& r) {
  auto pct = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << 100.0 * *v;
    return os.str();
  };
  out << "dataset " << r.dataset << "  (train " << r.train_size << ", test " << r.test_size << ", m "
      << r.series_length << ", candidates " << r.candidate_count << ", k " << r.selected_k << ")\n";
  out << std::left << std::setw(20) << "method" << "accuracy %\n";
  out << std::setw(20) << "ELM (raw)" << pct(r.raw_elm) << '\n';
  out << std::setw(20) << "DivShapELM" << pct(r.divshap_elm) << '\n';
  out << std::setw(20) << "1NN (raw)" << pct(r.raw_1nn) << '\n';
  out << std::setw(20) << "1NN (shapelets)" << pct(r.transformed_1nn) << '\n';
  const auto& t = r.timings;
  out << std::setw(24) << "phase" << "seconds\n" << std::setprecision(4) << std::fixed;
  out << std::setw(24) << "candidate selection" << t.candidate_selection << '\n';
  out << std::setw(24) << "diversified top-k" << t.diversified_selection << '\n';
  out << std::setw(24) << "final training" << t.final_training << '\n';
  out << std::setw(24) << "data transform" << t.transform << '\n';
  out << std::setw(24) << "classify DivShapELM" << t.classify_divshap << '\n';
  out << std::setw(24) << "classify ELM" << t.classify_elm << '\n';
  out << std::setw(24) << "total" << t.total << '\n';
  out.unsetf(std::ios::floatfield);
}

void write_sweep_csv(std::ostream& out, const ExperimentReport& r) {
  out << "k,cv_accuracy,test_accuracy,composition\n";
  for (std::size_t i = 0; i < r.sweep.size(); ++i) {
    std::optional<double> test;
    if (i < r.sweep_test_accuracy.size()) test = r.sweep_test_accuracy[i];
    out << r.sweep[i].k << ',' << fmt(r.sweep[i].accuracy) << ',' << fmt(test) << ',' << composition(r.sweep[i])
        << '\n';
  }
}

}  // namespace divshap
