#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "divshap/distance.hpp"

namespace divshap {

/// Provenance and split statistics of a scored candidate, without its values.
struct ScoredCandidate {
  std::size_t source_series = 0;
  std::size_t start = 0;
  std::size_t length = 0;
  int class_label = 0;          ///< label of the source series
  double split_threshold = 0.0; ///< optimal orderline split d
  double gain = 0.0;            ///< information gain in bits
  double gap = 0.0;             ///< mean(dist > d) - mean(dist <= d)
};

struct Shapelet : ScoredCandidate {
  std::vector<double> values;

  std::span<const double> view() const noexcept { return values; }
};

/// Mining order: gain desc, gap desc, length asc, source asc, start asc.
bool mining_order(const ScoredCandidate& a, const ScoredCandidate& b);

inline double shapelet_dist(const Shapelet& a, const Shapelet& b, const DistanceConfig& cfg) {
  return shapelet_dist(a.view(), b.view(), cfg);
}

}  // namespace divshap
