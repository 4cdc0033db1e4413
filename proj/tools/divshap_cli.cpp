// divshap: mine, diversify and classify UCR-format time series.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "divshap/bench.hpp"
#include "divshap/config.hpp"
#include "divshap/diversity_graph.hpp"
#include "divshap/error.hpp"
#include "divshap/mining.hpp"
#include "divshap/parallel.hpp"
#include "divshap/pipeline.hpp"

namespace {

using namespace divshap;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> kappa;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> position_stride;
  bool sax = false;
  std::string eval_mode;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "key = value config file");
  cmd->add_option("--seed", c.seed, "seed for ELM, evaluation folds and SAX masks");
  cmd->add_option("--kappa", c.kappa, "upper bound of the k sweep");
  cmd->add_option("--workers", c.workers, "worker threads (default: $DIVSHAP_WORKERS or 1)");
  cmd->add_option("--position-stride", c.position_stride, "candidate start stride");
  cmd->add_flag("--sax", c.sax, "enable the SAX candidate pre-filter");
  cmd->add_option("--eval-mode", c.eval_mode, "cv | train");
}

PipelineConfig resolve(const Common& c) {
  PipelineConfig cfg;
  cfg.workers = default_workers();
  if (!c.config_path.empty()) cfg = load_config(c.config_path, cfg);
  if (c.seed) {
    cfg.elm.seed = *c.seed;
    cfg.eval.seed = *c.seed;
    cfg.mining.sax.seed = *c.seed;
  }
  if (c.kappa) cfg.kappa = *c.kappa;
  if (c.workers) cfg.workers = *c.workers;
  if (c.position_stride) cfg.mining.position_stride = *c.position_stride;
  if (c.sax) cfg.mining.use_sax_filter = true;
  if (!c.eval_mode.empty()) cfg.eval.mode = eval_mode_from_string(c.eval_mode);
  cfg.mining.distance = cfg.distance;
  cfg.mining.workers = cfg.workers;
  return cfg;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diversified shapelet mining and ELM classification for UCR-format time series"};
  app.require_subcommand(1);

  Common common;
  std::string train_path, test_path, model_path, json_path, csv_path, out_path, edges_path, vertices_path;
  std::size_t top = 0;

  auto* fit_cmd = app.add_subcommand("fit", "fit a model on a training file");
  fit_cmd->add_option("--train", train_path, "training file")->required();
  fit_cmd->add_option("--model", model_path, "output model file")->required();
  fit_cmd->add_option("--sweep-csv", csv_path, "per-k evaluation accuracy CSV");
  add_common(fit_cmd, common);

  auto* predict_cmd = app.add_subcommand("predict", "label a test file with a saved model");
  predict_cmd->add_option("--model", model_path, "model file")->required();
  predict_cmd->add_option("--test", test_path, "test file")->required();
  predict_cmd->add_option("--out", out_path, "write predicted labels, one per line");

  auto* sweep_cmd = app.add_subcommand("sweep", "per-k accuracy curve");
  sweep_cmd->add_option("--train", train_path, "training file")->required();
  sweep_cmd->add_option("--test", test_path, "test file")->required();
  sweep_cmd->add_option("--csv", csv_path, "sweep CSV output");
  sweep_cmd->add_option("--json", json_path, "report JSON output");
  add_common(sweep_cmd, common);

  auto* compare_cmd = app.add_subcommand("compare", "raw ELM vs DivShapELM vs 1NN baselines");
  compare_cmd->add_option("--train", train_path, "training file")->required();
  compare_cmd->add_option("--test", test_path, "test file")->required();
  compare_cmd->add_option("--json", json_path, "report JSON output");
  compare_cmd->add_option("--csv", csv_path, "report CSV output");
  add_common(compare_cmd, common);

  auto* mine_cmd = app.add_subcommand("mine-dump", "write scored candidates as CSV");
  mine_cmd->add_option("--train", train_path, "training file")->required();
  mine_cmd->add_option("--out", out_path, "CSV output")->required();
  mine_cmd->add_option("--top", top, "keep only the best N candidates (0 = all)");
  add_common(mine_cmd, common);

  auto* graph_cmd = app.add_subcommand("graph-dump", "diversity graph over the best candidates");
  graph_cmd->add_option("--train", train_path, "training file")->required();
  graph_cmd->add_option("--edges", edges_path, "edge list CSV")->required();
  graph_cmd->add_option("--vertices", vertices_path, "vertex table CSV")->required();
  top = 0;
  graph_cmd->add_option("--top", top, "vertices to include (default 500)");
  add_common(graph_cmd, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_cmd->parsed()) {
      const auto cfg = resolve(common);
      const auto train = load_ucr(train_path);
      const auto model = fit(train, cfg);
      save_model(model, model_path);
      std::cout << "selected_k " << model.selected_k << " from " << model.candidate_count << " candidates\n";
      if (!csv_path.empty()) {
        ExperimentReport r;
        r.sweep = model.sweep;
        auto out = open_out(csv_path);
        write_sweep_csv(out, r);
      }
    } else if (predict_cmd->parsed()) {
      const auto model = load_model(model_path);
      auto test = load_ucr(test_path);
      // recode test labels against the model's names; unseen labels never match
      for (auto& ts : test.series) {
        const auto& text = test.label_names.at(static_cast<std::size_t>(ts.label));
        const auto it = std::find(model.label_names.begin(), model.label_names.end(), text);
        ts.label = it == model.label_names.end() ? -1 : static_cast<int>(it - model.label_names.begin());
      }
      test.label_names = model.label_names;
      const auto pred = predict_pipeline(model, test);
      std::ostream* sink = &std::cout;
      std::ofstream file;
      if (!out_path.empty()) {
        file = open_out(out_path);
        sink = &file;
      }
      for (int label : pred.labels) {
        const auto idx = static_cast<std::size_t>(label);
        *sink << (idx < model.label_names.size() ? model.label_names[idx] : std::to_string(label)) << '\n';
      }
      if (pred.accuracy) std::cerr << "accuracy " << *pred.accuracy << '\n';
    } else if (sweep_cmd->parsed() || compare_cmd->parsed()) {
      const auto cfg = resolve(common);
      const auto train = load_ucr(train_path);
      const auto test = load_ucr(test_path);
      const auto report = sweep_cmd->parsed() ? run_sweep(train, test, cfg) : run_compare(train, test, cfg);
      print_report_table(std::cout, report);
      if (!json_path.empty()) {
        auto out = open_out(json_path);
        write_report_json(out, report);
      }
      if (!csv_path.empty()) {
        auto out = open_out(csv_path);
        if (sweep_cmd->parsed()) {
          write_sweep_csv(out, report);
        } else {
          write_report_csv(out, report);
        }
      }
    } else if (mine_cmd->parsed()) {
      const auto cfg = resolve(common);
      const auto train = load_ucr(train_path);
      std::vector<std::string> warnings;
      auto mined = mine_scored(train, cfg.mining, &warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
      if (top && mined.size() > top) mined.resize(top);
      auto out = open_out(out_path);
      write_candidate_dump(out, train, mined);
    } else if (graph_cmd->parsed()) {
      const auto cfg = resolve(common);
      const auto train = load_ucr(train_path);
      auto mined = mine_scored(train, cfg.mining);
      const std::size_t limit = top ? top : 500;
      if (mined.size() > limit) mined.resize(limit);
      std::vector<Shapelet> vertices;
      vertices.reserve(mined.size());
      for (const auto& c : mined) vertices.push_back(materialize(train, c));
      const auto graph =
          build_graph(std::move(vertices), GraphConfig{cfg.distance, cfg.same_class_only, cfg.workers});
      auto edges = open_out(edges_path);
      auto verts = open_out(vertices_path);
      write_graph_dump(edges, verts, graph, train);
      std::cout << graph.size() << " vertices, " << graph.edge_count() << " edges\n";
    }
  } catch (const Error& e) {
    std::cerr << "divshap: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "divshap: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
