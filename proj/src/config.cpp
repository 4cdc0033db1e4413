#include "divshap/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>

#include "divshap/error.hpp"
#include "divshap/parallel.hpp"

namespace divshap {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || end != v.data() + v.size()) {
    throw Error(ErrorCode::InvalidArgument, key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || end != v.data() + v.size()) {
    throw Error(ErrorCode::InvalidArgument, key + ": expected an unsigned integer, got '" + v + "'");
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || end != v.data() + v.size()) {
    throw Error(ErrorCode::InvalidArgument, key + ": expected a number, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw Error(ErrorCode::InvalidArgument, key + ": expected a boolean, got '" + v + "'");
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"kappa", [](auto& c, auto& k, auto& v) { c.kappa = to_size(k, v); }},
      {"workers", [](auto& c, auto& k, auto& v) { c.workers = to_size(k, v); }},
      {"same_class_only", [](auto& c, auto& k, auto& v) { c.same_class_only = to_bool(k, v); }},
      {"mining.min_len", [](auto& c, auto& k, auto& v) { c.mining.min_len = to_size(k, v); }},
      {"mining.max_len", [](auto& c, auto& k, auto& v) { c.mining.max_len = to_size(k, v); }},
      {"mining.length_stride", [](auto& c, auto& k, auto& v) { c.mining.length_stride = to_size(k, v); }},
      {"mining.position_stride", [](auto& c, auto& k, auto& v) { c.mining.position_stride = to_size(k, v); }},
      {"mining.sax_filter", [](auto& c, auto& k, auto& v) { c.mining.use_sax_filter = to_bool(k, v); }},
      {"sax.word_length", [](auto& c, auto& k, auto& v) { c.mining.sax.word_length = to_size(k, v); }},
      {"sax.alphabet_size", [](auto& c, auto& k, auto& v) { c.mining.sax.alphabet_size = to_size(k, v); }},
      {"sax.iterations", [](auto& c, auto& k, auto& v) { c.mining.sax.projection_iterations = to_size(k, v); }},
      {"sax.keep_fraction", [](auto& c, auto& k, auto& v) { c.mining.sax.keep_fraction = to_double(k, v); }},
      {"sax.mask_size", [](auto& c, auto& k, auto& v) { c.mining.sax.mask_size = to_size(k, v); }},
      {"sax.seed", [](auto& c, auto& k, auto& v) { c.mining.sax.seed = to_u64(k, v); }},
      {"distance.normalize_windows", [](auto& c, auto& k, auto& v) { c.distance.normalize_windows = to_bool(k, v); }},
      {"distance.length_normalize", [](auto& c, auto& k, auto& v) { c.distance.length_normalize = to_bool(k, v); }},
      {"elm.hidden_nodes", [](auto& c, auto& k, auto& v) { c.elm.hidden_nodes = to_size(k, v); }},
      {"elm.activation", [](auto& c, auto&, auto& v) { c.elm.activation = activation_from_string(v); }},
      {"elm.seed", [](auto& c, auto& k, auto& v) { c.elm.seed = to_u64(k, v); }},
      {"elm.ridge", [](auto& c, auto& k, auto& v) { c.elm.ridge = to_double(k, v); }},
      {"eval.mode", [](auto& c, auto&, auto& v) { c.eval.mode = eval_mode_from_string(v); }},
      {"eval.folds", [](auto& c, auto& k, auto& v) { c.eval.folds = to_size(k, v); }},
      {"eval.repeats", [](auto& c, auto& k, auto& v) { c.eval.repeats = to_size(k, v); }},
      {"eval.seed", [](auto& c, auto& k, auto& v) { c.eval.seed = to_u64(k, v); }},
  };
  return table;
}

}  // namespace

std::size_t default_workers() {
  const char* env = std::getenv("DIVSHAP_WORKERS");
  if (!env || !*env) return 1;
  try {
    const auto n = to_size("DIVSHAP_WORKERS", trim(env));
    return n == 0 ? std::max(1u, std::thread::hardware_concurrency()) : n;
  } catch (const Error&) {
    return 1;
  }
}

void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
  it->second(cfg, key, value);
}

PipelineConfig parse_config(std::istream& in, PipelineConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(line_no) + ": missing '='");
    }
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  base.mining.distance = base.distance;
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_config(in, std::move(base));
}

}  // namespace divshap
