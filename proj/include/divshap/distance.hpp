#pragma once

#include <limits>
#include <span>

namespace divshap {

struct DistanceConfig {
  bool normalize_windows = true;  ///< z-normalize each window and the query
  bool length_normalize = true;   ///< divide squared distance by compared length
};

/// Sum of squared differences. Throws LengthMismatch on unequal lengths.
double euclid_sq(std::span<const double> a, std::span<const double> b);

/// Distance between two equal-length sequences under `cfg`.
double window_dist(std::span<const double> a, std::span<const double> b, const DistanceConfig& cfg);

/// Minimum window distance of `query` slid over `series` with stride 1.
///
/// Windows are abandoned as soon as their running sum exceeds the best so far.
/// When `upper_bound` is finite, the scan starts with it as the best-so-far:
/// the exact minimum is returned if it is <= upper_bound, otherwise some value
/// greater than upper_bound (possibly +inf).
double subsequence_dist(std::span<const double> series, std::span<const double> query,
                        const DistanceConfig& cfg,
                        double upper_bound = std::numeric_limits<double>::infinity());

/// Symmetric distance between two shapelet value lists: the shorter one is slid
/// along the longer one.
double shapelet_dist(std::span<const double> a, std::span<const double> b, const DistanceConfig& cfg,
                     double upper_bound = std::numeric_limits<double>::infinity());

}  // namespace divshap
