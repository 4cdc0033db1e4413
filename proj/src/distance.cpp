#include "divshap/distance.hpp"

#include <string>
#include <vector>

#include "divshap/dataset.hpp"
#include "divshap/error.hpp"

namespace divshap {

double euclid_sq(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

double window_dist(std::span<const double> a, std::span<const double> b, const DistanceConfig& cfg) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyInput, "empty sequence");
  double sum = 0.0;
  if (cfg.normalize_windows) {
    const auto za = znormalize(a);
    const auto zb = znormalize(b);
    sum = euclid_sq(za, zb);
  } else {
    sum = euclid_sq(a, b);
  }
  return cfg.length_normalize ? sum / static_cast<double>(a.size()) : sum;
}

double subsequence_dist(std::span<const double> series, std::span<const double> query,
                        const DistanceConfig& cfg, double upper_bound) {
  if (query.empty()) throw Error(ErrorCode::EmptyInput, "empty query");
  if (query.size() > series.size()) {
    throw Error(ErrorCode::ShapeletLongerThanSeries,
                std::to_string(query.size()) + " > " + std::to_string(series.size()));
  }
  const std::size_t len = query.size();
  const double scale = cfg.length_normalize ? static_cast<double>(len) : 1.0;

  std::vector<double> q(query.begin(), query.end());
  if (cfg.normalize_windows) q = znormalize(query);

  // Best-so-far in un-normalized units; a hair of slack keeps a window whose
  // scaled distance equals the bound from being abandoned by rounding.
  double best = upper_bound * scale * (1.0 + 1e-12);
  bool found = false;
  for (std::size_t start = 0; start + len <= series.size(); ++start) {
    const auto window = series.subspan(start, len);
    double sum = 0.0;
    bool abandoned = false;
    if (cfg.normalize_windows) {
      const auto st = window_stats(window);
      if (st.flat()) {
        for (std::size_t i = 0; i < len && !abandoned; ++i) {
          sum += q[i] * q[i];
          abandoned = sum > best;
        }
      } else {
        for (std::size_t i = 0; i < len && !abandoned; ++i) {
          const double diff = (window[i] - st.mean) / st.stddev - q[i];
          sum += diff * diff;
          abandoned = sum > best;
        }
      }
    } else {
      for (std::size_t i = 0; i < len && !abandoned; ++i) {
        const double diff = window[i] - q[i];
        sum += diff * diff;
        abandoned = sum > best;
      }
    }
    if (!abandoned && (!found || sum < best)) {
      best = sum;
      found = true;
    }
  }
  if (!found) return std::numeric_limits<double>::infinity();
  return best / scale;
}

double shapelet_dist(std::span<const double> a, std::span<const double> b, const DistanceConfig& cfg,
                     double upper_bound) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyInput, "empty shapelet");
  if (a.size() < b.size()) std::swap(a, b);
  return subsequence_dist(a, b, cfg, upper_bound);
}

}  // namespace divshap
