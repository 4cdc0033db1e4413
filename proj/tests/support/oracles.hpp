#pragma once

// Straightforward reference implementations used as test oracles. Nothing in
// here calls into the library's scoring or distance code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "divshap/dataset.hpp"

namespace oracle {

inline std::vector<double> znorm(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(v.size()));
  std::vector<double> out(v.size(), 0.0);
  if (sd < 1e-8) return out;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean) / sd;
  return out;
}

// Two-loop scan: every window, full sum, no abandoning.
inline double subsequence_dist(const std::vector<double>& t, const std::vector<double>& s,
                               bool normalize = true, bool length_normalize = true) {
  const auto q = normalize ? znorm(s) : s;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p + s.size() <= t.size(); ++p) {
    std::vector<double> w(t.begin() + static_cast<std::ptrdiff_t>(p),
                          t.begin() + static_cast<std::ptrdiff_t>(p + s.size()));
    if (normalize) w = znorm(w);
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) sum += (w[i] - q[i]) * (w[i] - q[i]);
    if (length_normalize) sum /= static_cast<double>(s.size());
    best = std::min(best, sum);
  }
  return best;
}

inline double entropy_of(const std::map<int, int>& counts) {
  int n = 0;
  for (auto& [_, c] : counts) n += c;
  double h = 0.0;
  for (auto& [_, c] : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

struct SplitResult {
  double threshold = 0.0;
  double gain = 0.0;
  std::size_t left_size = 0;  // members with distance <= threshold
};

// Every midpoint between distinct sorted distances is tried; gain ties (within
// tol) go to the wider margin, then the smaller threshold.
inline SplitResult best_split(const std::vector<double>& dist, const std::vector<int>& labels,
                              double tol = 1e-12) {
  std::vector<double> sorted = dist;
  std::sort(sorted.begin(), sorted.end());
  std::map<int, int> all;
  for (int l : labels) ++all[l];
  const double h = entropy_of(all);
  const double n = static_cast<double>(dist.size());
  struct Cand {
    double t, gain, gap;
    std::size_t left;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i] == sorted[i + 1]) continue;
    const double t = 0.5 * (sorted[i] + sorted[i + 1]);
    std::map<int, int> lo, hi;
    double lo_sum = 0, hi_sum = 0;
    std::size_t nl = 0, nh = 0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
      if (dist[j] <= t) {
        ++lo[labels[j]];
        lo_sum += dist[j];
        ++nl;
      } else {
        ++hi[labels[j]];
        hi_sum += dist[j];
        ++nh;
      }
    }
    const double g = h - (nl / n) * entropy_of(lo) - (nh / n) * entropy_of(hi);
    cands.push_back({t, g, hi_sum / nh - lo_sum / nl, nl});
  }
  SplitResult out;
  if (cands.empty()) return out;
  double top = -1.0;
  for (auto& c : cands) top = std::max(top, c.gain);
  double top_gap = -std::numeric_limits<double>::infinity();
  for (auto& c : cands)
    if (c.gain >= top - tol) top_gap = std::max(top_gap, c.gap);
  for (auto& c : cands) {
    if (c.gain >= top - tol && c.gap >= top_gap - tol) {
      out = {c.t, c.gain, c.left};
      break;
    }
  }
  return out;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace oracle

namespace toy {

// Random dataset with `classes` labels, each series uniform noise plus a
// class-specific bump so mining has something to find.
inline divshap::Dataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t m, int classes,
                                       double bump = 2.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  divshap::Dataset d;
  d.name = "toy";
  d.length = m;
  for (int c = 0; c < classes; ++c) d.label_names.push_back(std::to_string(c));
  for (std::size_t i = 0; i < n; ++i) {
    divshap::TimeSeries ts;
    ts.id = i;
    ts.label = static_cast<int>(i % static_cast<std::size_t>(classes));
    ts.values.resize(m);
    for (auto& v : ts.values) v = u(gen);
    const std::size_t at = (static_cast<std::size_t>(ts.label) * m) / static_cast<std::size_t>(classes + 1);
    for (std::size_t k = 0; k < std::min<std::size_t>(4, m - at); ++k) {
      ts.values[at + k] += bump * (k % 2 == 0 ? 1.0 : -1.0);
    }
    d.series.push_back(std::move(ts));
  }
  d.refresh_classes();
  return d;
}

inline divshap::Dataset from_rows(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  divshap::Dataset d;
  d.name = "rows";
  d.length = rows.front().size();
  int top = 0;
  for (int l : labels) top = std::max(top, l);
  for (int c = 0; c <= top; ++c) d.label_names.push_back(std::to_string(c));
  for (std::size_t i = 0; i < rows.size(); ++i) d.series.push_back({rows[i], labels[i], i});
  d.refresh_classes();
  return d;
}

}  // namespace toy
