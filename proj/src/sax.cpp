#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include <boost/math/distributions/normal.hpp>

#include "divshap/error.hpp"
#include "divshap/mining.hpp"
#include "divshap/random.hpp"

namespace divshap {

namespace {

std::vector<double> gaussian_breakpoints(std::size_t alphabet_size) {
  std::vector<double> cuts;
  const boost::math::normal standard;
  for (std::size_t k = 1; k < alphabet_size; ++k) {
    cuts.push_back(boost::math::quantile(standard, static_cast<double>(k) /
                                                       static_cast<double>(alphabet_size)));
  }
  return cuts;
}

}  // namespace

std::vector<std::uint8_t> sax_word(std::span<const double> values, std::size_t word_length,
                                   std::size_t alphabet_size) {
  if (values.empty() || word_length == 0) throw Error(ErrorCode::EmptyInput, "empty SAX input");
  if (alphabet_size == 0 || alphabet_size > 256) {
    throw Error(ErrorCode::InvalidArgument, "alphabet size must be in [1, 256]");
  }
  const auto z = znormalize(values);
  const std::size_t len = z.size();
  const std::size_t w = std::min(word_length, len);
  const auto cuts = gaussian_breakpoints(alphabet_size);
  std::vector<std::uint8_t> word(w);
  for (std::size_t s = 0; s < w; ++s) {
    const std::size_t lo = s * len / w;
    const std::size_t hi = (s + 1) * len / w;
    double mean = 0.0;
    for (std::size_t t = lo; t < hi; ++t) mean += z[t];
    mean /= static_cast<double>(hi - lo);
    word[s] = static_cast<std::uint8_t>(std::upper_bound(cuts.begin(), cuts.end(), mean) - cuts.begin());
  }
  return word;
}

SaxFilterResult sax_filter(const Dataset& train, std::span<const CandidateRef> candidates,
                           const SaxConfig& cfg) {
  SaxFilterResult out;
  if (!(cfg.keep_fraction > 0.0 && cfg.keep_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "keep_fraction must be in (0, 1]");
  }
  const std::size_t n = candidates.size();
  const auto keep = static_cast<std::size_t>(std::ceil(cfg.keep_fraction * static_cast<double>(n)));
  if (keep >= n) {
    out.kept.assign(candidates.begin(), candidates.end());
    return out;
  }
  if (cfg.alphabet_size <= 1) {
    out.warnings.push_back("SAX alphabet of size 1 makes every word identical; keeping all candidates");
    out.kept.assign(candidates.begin(), candidates.end());
    return out;
  }

  std::vector<std::vector<std::uint8_t>> words(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto& r = candidates[c];
    words[c] = sax_word(std::span<const double>(train.series[r.series].values).subspan(r.start, r.length),
                        cfg.word_length, cfg.alphabet_size);
  }

  const auto class_sizes = train.class_counts();
  const std::size_t labels = class_sizes.size();
  std::vector<double> collisions(n * labels, 0.0);
  Rng rng(cfg.seed);
  std::vector<std::size_t> positions(cfg.word_length);
  std::iota(positions.begin(), positions.end(), 0);

  for (std::size_t it = 0; it < cfg.projection_iterations; ++it) {
    rng.shuffle(positions);
    std::vector<char> masked(cfg.word_length, 0);
    for (std::size_t k = 0; k < std::min(cfg.mask_size, cfg.word_length); ++k) masked[positions[k]] = 1;

    // Projected word -> per-series hit marks.
    std::unordered_map<std::string, std::vector<char>> buckets;
    std::vector<std::string> keys(n);
    for (std::size_t c = 0; c < n; ++c) {
      std::string key(1, static_cast<char>(words[c].size()));
      for (std::size_t s = 0; s < words[c].size(); ++s) {
        key.push_back(masked[s] ? '\xff' : static_cast<char>(words[c][s]));
      }
      auto& hits = buckets[key];
      if (hits.empty()) hits.assign(train.size(), 0);
      hits[candidates[c].series] = 1;
      keys[c] = std::move(key);
    }
    for (std::size_t c = 0; c < n; ++c) {
      const auto& hits = buckets.at(keys[c]);
      for (std::size_t s = 0; s < train.size(); ++s) {
        if (hits[s]) collisions[c * labels + static_cast<std::size_t>(train.series[s].label)] += 1.0;
      }
    }
  }

  // Distinguishing power: spread of per-class collision rates.
  std::vector<double> power(n, 0.0);
  const double rounds = static_cast<double>(std::max<std::size_t>(1, cfg.projection_iterations));
  for (std::size_t c = 0; c < n; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int code : train.classes) {
      const auto k = static_cast<std::size_t>(code);
      const double rate = collisions[c * labels + k] / (rounds * static_cast<double>(class_sizes[k]));
      lo = std::min(lo, rate);
      hi = std::max(hi, rate);
    }
    power[c] = train.classes.size() < 2 ? 0.0 : hi - lo;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return power[a] > power[b]; });
  order.resize(keep);
  std::sort(order.begin(), order.end());
  out.kept.reserve(keep);
  for (auto idx : order) out.kept.push_back(candidates[idx]);
  return out;
}

}  // namespace divshap
