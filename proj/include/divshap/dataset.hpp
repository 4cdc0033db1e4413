#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace divshap {

/// Flat-signal cutoff: vectors whose population std falls below this are
/// treated as constant.
inline constexpr double kFlatEpsilon = 1e-8;

struct TimeSeries {
  std::vector<double> values;
  int label = 0;        ///< index into Dataset::label_names
  std::size_t id = 0;   ///< ordinal within its dataset
};

/// Labeled fixed-length series. Treat as immutable once built.
struct Dataset {
  std::string name;
  std::vector<TimeSeries> series;
  std::size_t length = 0;                ///< m, common series length
  std::vector<int> classes;              ///< sorted distinct codes present in `series`
  std::vector<std::string> label_names;  ///< code -> original label text

  std::size_t size() const noexcept { return series.size(); }
  bool empty() const noexcept { return series.empty(); }

  /// Per-code member counts, indexed by code (size = label_names.size()).
  std::vector<std::size_t> class_counts() const;

  /// Fills `classes` from the series labels.
  void refresh_classes();
};

enum class DelimiterPolicy { Auto, Comma, Whitespace };

/// Parses UCR flat-file text: one series per line, label first.
/// Blank lines and lines starting with '#' are skipped.
Dataset parse_ucr(std::istream& in, DelimiterPolicy policy = DelimiterPolicy::Auto,
                  std::string name = {});
Dataset load_ucr(const std::filesystem::path& path,
                 DelimiterPolicy policy = DelimiterPolicy::Auto);

/// Writes comma-separated UCR text with 17 significant digits.
void write_ucr(std::ostream& out, const Dataset& d);

/// Re-codes two datasets onto a shared label codebook (sorted union of names).
std::pair<Dataset, Dataset> harmonize_labels(const Dataset& train, const Dataset& test);

/// Subset by series index; ids are renumbered 0..n-1 and labels keep their codes.
Dataset subset(const Dataset& d, std::span<const std::size_t> indices);

/// Z-normalization with population std; near-constant input maps to zeros.
std::vector<double> znormalize(std::span<const double> values);

/// Mean and population std of a window, computed in two passes.
struct WindowStats {
  double mean = 0.0;
  double stddev = 0.0;
  bool flat() const noexcept { return stddev < kFlatEpsilon; }
};
WindowStats window_stats(std::span<const double> values);

struct FoldAssignment {
  std::vector<int> fold;               ///< fold index per series
  std::size_t folds = 0;
  std::vector<std::string> warnings;
};

/// Stratified fold assignment, deterministic for a fixed seed.
FoldAssignment stratified_folds(const Dataset& d, std::size_t folds, std::uint64_t seed);

}  // namespace divshap
