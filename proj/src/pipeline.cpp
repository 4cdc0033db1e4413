#include "divshap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>

#include "divshap/error.hpp"
#include "divshap/parallel.hpp"
#include "divshap/random.hpp"

namespace divshap {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<int> predict_or_constant(const FeatureMatrix& train, const FeatureMatrix& test,
                                     const ElmConfig& elm) {
  std::vector<int> distinct(train.labels);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) return std::vector<int>(test.rows(), distinct.front());
  const auto model = train_elm(train.values, train.labels, elm);
  return predict(model, test.values);
}

}  // namespace

std::string to_string(EvalMode m) {
  return m == EvalMode::CrossValidation ? "cv" : "train";
}

EvalMode eval_mode_from_string(const std::string& name) {
  if (name == "cv" || name == "cross-validation") return EvalMode::CrossValidation;
  if (name == "train" || name == "training-accuracy") return EvalMode::TrainingAccuracy;
  throw Error(ErrorCode::InvalidArgument, "unknown eval mode '" + name + "'");
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::DimensionMismatch, "label counts differ");
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double evaluate_features(const FeatureMatrix& features, const Dataset& train, const PipelineConfig& cfg,
                         std::uint64_t salt) {
  const std::size_t repeats = std::max<std::size_t>(1, cfg.eval.repeats);
  const std::size_t folds = std::min(cfg.eval.folds, train.size());
  double total = 0.0;
  for (std::size_t r = 0; r < repeats; ++r) {
    ElmConfig elm = cfg.elm;
    elm.seed = mix_seed(cfg.elm.seed, salt, r);
    if (cfg.eval.mode == EvalMode::TrainingAccuracy || folds < 2) {
      const auto scaling = fit_scaling(features);
      const auto scaled = apply_scaling(features, scaling);
      total += accuracy(predict_or_constant(scaled, scaled, elm), scaled.labels);
      continue;
    }
    const auto assignment = stratified_folds(train, folds, mix_seed(cfg.eval.seed, r));
    double fold_sum = 0.0;
    std::size_t fold_count = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<std::size_t> fit_rows, held_rows;
      for (std::size_t i = 0; i < train.size(); ++i) {
        (static_cast<std::size_t>(assignment.fold[i]) == f ? held_rows : fit_rows).push_back(i);
      }
      if (held_rows.empty() || fit_rows.empty()) continue;
      const auto fit_part = select_rows(features, fit_rows);
      const auto scaling = fit_scaling(fit_part);
      const auto fit_scaled = apply_scaling(fit_part, scaling);
      const auto held_scaled = apply_scaling(select_rows(features, held_rows), scaling);
      fold_sum += accuracy(predict_or_constant(fit_scaled, held_scaled, elm), held_scaled.labels);
      ++fold_count;
    }
    total += fold_count ? fold_sum / static_cast<double>(fold_count) : 0.0;
  }
  return total / static_cast<double>(repeats);
}

KSelection select_k(std::vector<Shapelet> diversified, const Dataset& train, const PipelineConfig& cfg) {
  if (diversified.empty()) throw Error(ErrorCode::EmptyInput, "no diversified shapelets");
  if (cfg.kappa == 0) throw Error(ErrorCode::InvalidArgument, "kappa must be at least 1");
  if (diversified.size() > cfg.kappa) diversified.resize(cfg.kappa);

  KSelection out;
  const auto features = transform(train, diversified, cfg.distance, cfg.workers);
  out.sweep.resize(diversified.size());
  parallel_for(diversified.size(), cfg.workers, [&](std::size_t i) {
    const std::size_t k = i + 1;
    auto& entry = out.sweep[i];
    entry.k = k;
    entry.accuracy = evaluate_features(leading_columns(features, k), train, cfg, k);
    entry.class_composition.assign(train.label_names.size(), 0);
    for (std::size_t s = 0; s < k; ++s) {
      ++entry.class_composition.at(static_cast<std::size_t>(diversified[s].class_label));
    }
  });
  double best = -1.0;
  for (const auto& entry : out.sweep) {
    if (entry.accuracy > best) {
      best = entry.accuracy;
      out.k = entry.k;
    }
  }
  out.shapelets.assign(diversified.begin(), diversified.begin() + static_cast<std::ptrdiff_t>(out.k));
  out.diversified = std::move(diversified);
  return out;
}

PipelineModel fit(const Dataset& train, const PipelineConfig& cfg, FitTimings* timings) {
  MiningConfig mining = cfg.mining;
  mining.distance = cfg.distance;
  mining.workers = cfg.workers;
  const auto start = Clock::now();
  auto mined = mine_scored(train, mining);
  if (timings) timings->candidate_selection = seconds_since(start);
  return fit_with_candidates(train, std::move(mined), cfg, timings);
}

PipelineModel fit_with_candidates(const Dataset& train, std::vector<ScoredCandidate> mined,
                                  const PipelineConfig& cfg, FitTimings* timings) {
  if (train.classes.size() < 2) {
    throw Error(ErrorCode::SingleClassTraining, "training set holds fewer than two classes");
  }
  PipelineModel model;
  model.series_length = train.length;
  model.label_names = train.label_names;
  model.config = cfg;
  model.candidate_count = mined.size();

  auto start = Clock::now();
  LazyDiversityGraph graph(train, std::move(mined),
                           GraphConfig{cfg.distance, cfg.same_class_only, cfg.workers});
  auto selection = select_k(graph, train, cfg);
  if (timings) timings->diversified_selection = seconds_since(start);

  start = Clock::now();
  model.selected_k = selection.k;
  model.shapelets = std::move(selection.shapelets);
  model.diversified = std::move(selection.diversified);
  model.sweep = std::move(selection.sweep);
  const auto features = transform(train, model.shapelets, cfg.distance, cfg.workers);
  model.scaling = fit_scaling(features);
  const auto scaled = apply_scaling(features, model.scaling);
  model.elm = train_elm(scaled.values, scaled.labels, cfg.elm);
  if (timings) timings->final_training = seconds_since(start);
  return model;
}

FeatureMatrix model_features(const PipelineModel& model, const Dataset& d) {
  if (!d.empty() && d.length != model.series_length) {
    throw Error(ErrorCode::LengthMismatch, "series length " + std::to_string(d.length) +
                                               ", model expects " + std::to_string(model.series_length));
  }
  return apply_scaling(transform(d, model.shapelets, model.config.distance, model.config.workers),
                       model.scaling);
}

Prediction predict_pipeline(const PipelineModel& model, const Dataset& test) {
  Prediction out;
  if (test.empty()) return out;
  const auto features = model_features(model, test);
  out.labels = predict(model.elm, features.values);
  out.accuracy = accuracy(out.labels, features.labels);
  return out;
}

nlohmann::json to_json(const PipelineConfig& cfg) {
  const auto& m = cfg.mining;
  return {
      {"kappa", cfg.kappa},
      {"mining",
       {{"min_len", m.min_len},
        {"max_len", m.max_len},
        {"length_stride", m.length_stride},
        {"position_stride", m.position_stride},
        {"use_sax_filter", m.use_sax_filter},
        {"sax",
         {{"word_length", m.sax.word_length},
          {"alphabet_size", m.sax.alphabet_size},
          {"projection_iterations", m.sax.projection_iterations},
          {"keep_fraction", m.sax.keep_fraction},
          {"mask_size", m.sax.mask_size},
          {"seed", m.sax.seed}}}}},
      {"distance",
       {{"normalize_windows", cfg.distance.normalize_windows},
        {"length_normalize", cfg.distance.length_normalize}}},
      {"elm",
       {{"hidden_nodes", cfg.elm.hidden_nodes},
        {"activation", to_string(cfg.elm.activation)},
        {"seed", cfg.elm.seed},
        {"ridge", cfg.elm.ridge}}},
      {"eval",
       {{"mode", to_string(cfg.eval.mode)},
        {"folds", cfg.eval.folds},
        {"repeats", cfg.eval.repeats},
        {"seed", cfg.eval.seed}}},
      {"same_class_only", cfg.same_class_only},
  };
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  PipelineConfig cfg;
  cfg.kappa = j.at("kappa").get<std::size_t>();
  const auto& m = j.at("mining");
  cfg.mining.min_len = m.at("min_len").get<std::size_t>();
  cfg.mining.max_len = m.at("max_len").get<std::size_t>();
  cfg.mining.length_stride = m.at("length_stride").get<std::size_t>();
  cfg.mining.position_stride = m.at("position_stride").get<std::size_t>();
  cfg.mining.use_sax_filter = m.at("use_sax_filter").get<bool>();
  const auto& s = m.at("sax");
  cfg.mining.sax.word_length = s.at("word_length").get<std::size_t>();
  cfg.mining.sax.alphabet_size = s.at("alphabet_size").get<std::size_t>();
  cfg.mining.sax.projection_iterations = s.at("projection_iterations").get<std::size_t>();
  cfg.mining.sax.keep_fraction = s.at("keep_fraction").get<double>();
  cfg.mining.sax.mask_size = s.at("mask_size").get<std::size_t>();
  cfg.mining.sax.seed = s.at("seed").get<std::uint64_t>();
  cfg.distance.normalize_windows = j.at("distance").at("normalize_windows").get<bool>();
  cfg.distance.length_normalize = j.at("distance").at("length_normalize").get<bool>();
  cfg.mining.distance = cfg.distance;
  const auto& e = j.at("elm");
  cfg.elm.hidden_nodes = e.at("hidden_nodes").get<std::size_t>();
  cfg.elm.activation = activation_from_string(e.at("activation").get<std::string>());
  cfg.elm.seed = e.at("seed").get<std::uint64_t>();
  cfg.elm.ridge = e.at("ridge").get<double>();
  const auto& v = j.at("eval");
  cfg.eval.mode = eval_mode_from_string(v.at("mode").get<std::string>());
  cfg.eval.folds = v.at("folds").get<std::size_t>();
  cfg.eval.repeats = v.at("repeats").get<std::size_t>();
  cfg.eval.seed = v.at("seed").get<std::uint64_t>();
  cfg.same_class_only = j.at("same_class_only").get<bool>();
  return cfg;
}

namespace {

nlohmann::json shapelets_to_json(const std::vector<Shapelet>& list) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : list) {
    out.push_back({{"source_series", s.source_series},
                   {"start", s.start},
                   {"length", s.length},
                   {"class_label", s.class_label},
                   {"split_threshold", s.split_threshold},
                   {"gain", s.gain},
                   {"gap", s.gap},
                   {"values", s.values}});
  }
  return out;
}

std::vector<Shapelet> shapelets_from_json(const nlohmann::json& j) {
  std::vector<Shapelet> out;
  for (const auto& e : j) {
    Shapelet s;
    s.source_series = e.at("source_series").get<std::size_t>();
    s.start = e.at("start").get<std::size_t>();
    s.length = e.at("length").get<std::size_t>();
    s.class_label = e.at("class_label").get<int>();
    s.split_threshold = e.at("split_threshold").get<double>();
    s.gain = e.at("gain").get<double>();
    s.gap = e.at("gap").get<double>();
    s.values = e.at("values").get<std::vector<double>>();
    if (s.values.size() != s.length) throw Error(ErrorCode::ModelFormat, "shapelet length mismatch");
    out.push_back(std::move(s));
  }
  return out;
}

constexpr int kModelVersion = 1;

}  // namespace

nlohmann::json to_json(const PipelineModel& model) {
  nlohmann::json sweep = nlohmann::json::array();
  for (const auto& e : model.sweep) {
    sweep.push_back({{"k", e.k}, {"accuracy", e.accuracy}, {"class_composition", e.class_composition}});
  }
  return {
      {"format", "divshap-model"},
      {"version", kModelVersion},
      {"config", to_json(model.config)},
      {"series_length", model.series_length},
      {"label_names", model.label_names},
      {"selected_k", model.selected_k},
      {"candidate_count", model.candidate_count},
      {"shapelets", shapelets_to_json(model.shapelets)},
      {"diversified", shapelets_to_json(model.diversified)},
      {"scaling", {{"min", model.scaling.min}, {"max", model.scaling.max}}},
      {"elm", to_json(model.elm)},
      {"sweep", std::move(sweep)},
  };
}

PipelineModel pipeline_model_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != "divshap-model") {
    throw Error(ErrorCode::ModelFormat, "not a divshap model file");
  }
  if (j.at("version").get<int>() != kModelVersion) {
    throw Error(ErrorCode::ModelFormat, "unsupported model version " + j.at("version").dump());
  }
  PipelineModel model;
  model.config = pipeline_config_from_json(j.at("config"));
  model.series_length = j.at("series_length").get<std::size_t>();
  model.label_names = j.at("label_names").get<std::vector<std::string>>();
  model.selected_k = j.at("selected_k").get<std::size_t>();
  model.candidate_count = j.at("candidate_count").get<std::size_t>();
  model.shapelets = shapelets_from_json(j.at("shapelets"));
  model.diversified = shapelets_from_json(j.at("diversified"));
  model.scaling.min = j.at("scaling").at("min").get<std::vector<double>>();
  model.scaling.max = j.at("scaling").at("max").get<std::vector<double>>();
  model.elm = elm_from_json(j.at("elm"));
  for (const auto& e : j.at("sweep")) {
    model.sweep.push_back({e.at("k").get<std::size_t>(), e.at("accuracy").get<double>(),
                           e.at("class_composition").get<std::vector<std::size_t>>()});
  }
  if (model.shapelets.size() != model.selected_k || model.scaling.min.size() != model.selected_k) {
    throw Error(ErrorCode::ModelFormat, "selected_k disagrees with stored shapelets");
  }
  return model;
}

void save_model(const PipelineModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << to_json(model).dump(1) << '\n';
}

PipelineModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ModelFormat, e.what());
  }
  return pipeline_model_from_json(j);
}

}  // namespace divshap
