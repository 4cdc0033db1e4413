#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "divshap/dataset.hpp"
#include "divshap/distance.hpp"
#include "divshap/shapelet.hpp"

namespace divshap {

struct SaxConfig {
  std::size_t word_length = 16;
  std::size_t alphabet_size = 4;
  std::size_t projection_iterations = 10;
  double keep_fraction = 0.25;
  std::size_t mask_size = 3;  ///< symbols hidden per random projection
  std::uint64_t seed = 7;
};

struct MiningConfig {
  std::size_t min_len = 0;  ///< 0 selects max(3, m/11)
  std::size_t max_len = 0;  ///< 0 selects m/2
  std::size_t length_stride = 1;
  std::size_t position_stride = 1;
  bool use_sax_filter = false;
  SaxConfig sax;
  DistanceConfig distance;
  std::size_t workers = 1;
};

struct LengthBand {
  std::size_t min_len = 0;
  std::size_t max_len = 0;
};

/// Resolves the length band for series length m. Throws BandEmpty or
/// InvalidArgument when the band is unusable.
LengthBand resolve_band(std::size_t m, const MiningConfig& cfg);

/// Location of an unscored candidate subsequence.
struct CandidateRef {
  std::size_t series = 0;
  std::size_t start = 0;
  std::size_t length = 0;
};

/// Every band subsequence in generation order (series, length, start), with
/// exact-duplicate value lists dropped after their first occurrence.
std::vector<CandidateRef> enumerate_candidates(const Dataset& train, const MiningConfig& cfg);

/// Materialized, unscored candidates (see enumerate_candidates).
std::vector<Shapelet> generate_candidates(const Dataset& train, const MiningConfig& cfg);

/// Shannon entropy in bits; zero counts contribute nothing.
double entropy(std::span<const std::size_t> counts);

struct OrderlineEntry {
  double distance = 0.0;
  int label = 0;
  std::size_t series = 0;
};

/// Distances from `shapelet` to every training series, ascending; ties keep
/// series order.
std::vector<OrderlineEntry> orderline(std::span<const double> shapelet, const Dataset& train,
                                      const DistanceConfig& cfg);

struct Split {
  double threshold = 0.0;
  double gain = 0.0;
  double gap = 0.0;
  bool degenerate = false;  ///< fewer than two classes, or no distinct distances
};

/// Gains closer than this are treated as ties during split selection.
inline constexpr double kGainTieTolerance = 1e-12;

/// Best information-gain threshold over midpoints of consecutive distinct
/// distances. Ties go to the larger gap, then to the smaller threshold.
/// `label_count` bounds the label codes in `ol`.
Split best_split(std::span<const OrderlineEntry> ol, std::size_t label_count);

struct SaxFilterResult {
  std::vector<CandidateRef> kept;  ///< surviving candidates, input order preserved
  std::vector<std::string> warnings;
};

/// Optional pre-filter: keeps the ceil(keep_fraction * n) candidates whose SAX
/// words best separate the classes under random-masking collision counts.
SaxFilterResult sax_filter(const Dataset& train, std::span<const CandidateRef> candidates,
                           const SaxConfig& cfg);

/// SAX word of a sequence: z-normalize, PAA to `word_length` segments,
/// discretize with Gaussian breakpoints.
std::vector<std::uint8_t> sax_word(std::span<const double> values, std::size_t word_length,
                                   std::size_t alphabet_size);

/// Scores every surviving candidate; result sorted by mining_order.
std::vector<ScoredCandidate> mine_scored(const Dataset& train, const MiningConfig& cfg,
                                         std::vector<std::string>* warnings = nullptr);

/// Copies the candidate's values out of its source series.
Shapelet materialize(const Dataset& train, const ScoredCandidate& c);

/// mine_scored with values attached.
std::vector<Shapelet> mine_shapelets(const Dataset& train, const MiningConfig& cfg);

/// CSV: source_id,start,length,class,gain,threshold,gap,values (space-joined).
void write_candidate_dump(std::ostream& out, const Dataset& train,
                          std::span<const ScoredCandidate> candidates);

}  // namespace divshap
