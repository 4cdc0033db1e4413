#include "divshap/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "divshap/error.hpp"
#include "divshap/random.hpp"

namespace divshap {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::NonNumericField: return "NonNumericField";
    case ErrorCode::FoldCountTooLarge: return "FoldCountTooLarge";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ShapeletLongerThanSeries: return "ShapeletLongerThanSeries";
    case ErrorCode::BandEmpty: return "BandEmpty";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::SingleClassTraining: return "SingleClassTraining";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::ModelFormat: return "ModelFormat";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(label_names.size(), 0);
  for (const auto& s : series) ++counts.at(static_cast<std::size_t>(s.label));
  return counts;
}

void Dataset::refresh_classes() {
  classes.clear();
  for (const auto& s : series) classes.push_back(s.label);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_fields(std::string_view line, bool comma) {
  std::vector<std::string_view> fields;
  if (comma) {
    std::size_t pos = 0;
    for (;;) {
      const auto next = line.find(',', pos);
      fields.push_back(trim(line.substr(pos, next == std::string_view::npos ? next : next - pos)));
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
  } else {
    std::size_t pos = 0;
    while (pos < line.size()) {
      pos = line.find_first_not_of(" \t", pos);
      if (pos == std::string_view::npos) break;
      const auto next = line.find_first_of(" \t", pos);
      fields.push_back(line.substr(pos, next == std::string_view::npos ? next : next - pos));
      pos = next;
    }
  }
  return fields;
}

// "1.0000000e+00" and "1" name the same class.
std::string canonical_label(std::string_view text) {
  double v = 0.0;
  if (parse_double(text, v) && std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    std::ostringstream os;
    os << static_cast<long long>(v);
    return os.str();
  }
  return std::string(text);
}

Dataset code_labels(std::string name, std::vector<std::vector<double>> rows,
                    const std::vector<std::string>& labels, std::size_t length) {
  std::vector<std::string> names(labels);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::map<std::string, int> code;
  for (std::size_t i = 0; i < names.size(); ++i) code[names[i]] = static_cast<int>(i);

  Dataset d;
  d.name = std::move(name);
  d.length = length;
  d.label_names = std::move(names);
  d.series.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.series.push_back(TimeSeries{std::move(rows[i]), code.at(labels[i]), i});
  }
  d.refresh_classes();
  return d;
}

}  // namespace

Dataset parse_ucr(std::istream& in, DelimiterPolicy policy, std::string name) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::size_t width = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (policy == DelimiterPolicy::Auto) {
      policy = line.find(',') != std::string_view::npos ? DelimiterPolicy::Comma
                                                         : DelimiterPolicy::Whitespace;
    }
    const auto fields = split_fields(line, policy == DelimiterPolicy::Comma);
    if (fields.size() < 2) {
      throw Error(ErrorCode::EmptyInput, "line " + std::to_string(line_no) + " has no samples");
    }
    if (width == 0) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw Error(ErrorCode::RaggedRow, "line " + std::to_string(line_no) + " has " +
                                            std::to_string(fields.size()) + " fields, expected " +
                                            std::to_string(width));
    }
    if (fields[0].empty()) {
      throw Error(ErrorCode::NonNumericField, "line " + std::to_string(line_no) + ": empty label");
    }
    std::vector<double> values(width - 1);
    for (std::size_t f = 1; f < width; ++f) {
      if (!parse_double(fields[f], values[f - 1]) || !std::isfinite(values[f - 1])) {
        throw Error(ErrorCode::NonNumericField, "line " + std::to_string(line_no) + ", field " +
                                                    std::to_string(f + 1) + ": '" +
                                                    std::string(fields[f]) + "'");
      }
    }
    labels.push_back(canonical_label(fields[0]));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "no series in input");
  return code_labels(std::move(name), std::move(rows), labels, width - 1);
}

Dataset load_ucr(const std::filesystem::path& path, DelimiterPolicy policy) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_ucr(in, policy, path.stem().string());
}

void write_ucr(std::ostream& out, const Dataset& d) {
  std::ostringstream line;
  line.precision(17);
  for (const auto& s : d.series) {
    line.str({});
    line << d.label_names.at(static_cast<std::size_t>(s.label));
    for (double v : s.values) line << ',' << v;
    out << line.str() << '\n';
  }
}

std::pair<Dataset, Dataset> harmonize_labels(const Dataset& train, const Dataset& test) {
  std::vector<std::string> names = train.label_names;
  names.insert(names.end(), test.label_names.begin(), test.label_names.end());
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  auto recode = [&](const Dataset& d) {
    Dataset out = d;
    out.label_names = names;
    for (auto& s : out.series) {
      const auto& text = d.label_names.at(static_cast<std::size_t>(s.label));
      s.label = static_cast<int>(std::lower_bound(names.begin(), names.end(), text) - names.begin());
    }
    out.refresh_classes();
    return out;
  };
  return {recode(train), recode(test)};
}

Dataset subset(const Dataset& d, std::span<const std::size_t> indices) {
  Dataset out;
  out.name = d.name;
  out.length = d.length;
  out.label_names = d.label_names;
  out.series.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    TimeSeries s = d.series.at(indices[i]);
    s.id = i;
    out.series.push_back(std::move(s));
  }
  out.refresh_classes();
  return out;
}

WindowStats window_stats(std::span<const double> values) {
  WindowStats st;
  if (values.empty()) return st;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  st.mean = sum / n;
  double sq = 0.0;
  for (double v : values) sq += (v - st.mean) * (v - st.mean);
  st.stddev = std::sqrt(sq / n);
  return st;
}

std::vector<double> znormalize(std::span<const double> values) {
  const auto st = window_stats(values);
  std::vector<double> out(values.size(), 0.0);
  if (st.flat()) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - st.mean) / st.stddev;
  return out;
}

FoldAssignment stratified_folds(const Dataset& d, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::InvalidArgument, "fold count must be at least 2");
  if (folds > d.size()) {
    throw Error(ErrorCode::FoldCountTooLarge, std::to_string(folds) + " folds for " +
                                                  std::to_string(d.size()) + " series");
  }
  FoldAssignment out;
  out.folds = folds;
  out.fold.assign(d.size(), -1);
  Rng rng(seed);
  std::size_t offset = 0;
  for (int code : d.classes) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.series[i].label == code) members.push_back(i);
    }
    if (members.size() < folds) {
      out.warnings.push_back("class '" + d.label_names.at(static_cast<std::size_t>(code)) +
                             "' has " + std::to_string(members.size()) + " members for " +
                             std::to_string(folds) + " folds; using leave-one-out for it");
    }
    rng.shuffle(members);
    for (std::size_t r = 0; r < members.size(); ++r) {
      out.fold[members[r]] = static_cast<int>((offset + r) % folds);
    }
    offset = (offset + members.size()) % folds;
  }
  return out;
}

}  // namespace divshap
