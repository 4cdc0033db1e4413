#include "divshap/mining.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "divshap/error.hpp"
#include "divshap/parallel.hpp"

namespace divshap {

bool mining_order(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.gain != b.gain) return a.gain > b.gain;
  if (a.gap != b.gap) return a.gap > b.gap;
  if (a.length != b.length) return a.length < b.length;
  if (a.source_series != b.source_series) return a.source_series < b.source_series;
  return a.start < b.start;
}

LengthBand resolve_band(std::size_t m, const MiningConfig& cfg) {
  LengthBand band;
  band.min_len = cfg.min_len != 0 ? cfg.min_len : std::max<std::size_t>(3, m / 11);
  band.max_len = cfg.max_len != 0 ? cfg.max_len : m / 2;
  if (band.min_len < 2) throw Error(ErrorCode::InvalidArgument, "min_len must be at least 2");
  if (band.max_len > m) {
    throw Error(ErrorCode::InvalidArgument,
                "max_len " + std::to_string(band.max_len) + " exceeds series length " +
                    std::to_string(m));
  }
  if (band.min_len > band.max_len) {
    throw Error(ErrorCode::BandEmpty, "min_len " + std::to_string(band.min_len) + " > max_len " +
                                          std::to_string(band.max_len));
  }
  if (cfg.length_stride == 0 || cfg.position_stride == 0) {
    throw Error(ErrorCode::InvalidArgument, "strides must be positive");
  }
  return band;
}

namespace {

std::uint64_t hash_values(std::span<const double> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ values.size();
  for (double v : values) {
    const double canon = v == 0.0 ? 0.0 : v;
    h ^= std::bit_cast<std::uint64_t>(canon);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return h;
}

std::span<const double> values_of(const Dataset& d, const CandidateRef& c) {
  return std::span<const double>(d.series[c.series].values).subspan(c.start, c.length);
}

}  // namespace

std::vector<CandidateRef> enumerate_candidates(const Dataset& train, const MiningConfig& cfg) {
  const auto band = resolve_band(train.length, cfg);
  std::vector<CandidateRef> out;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
  for (std::size_t i = 0; i < train.size(); ++i) {
    for (std::size_t len = band.min_len; len <= band.max_len; len += cfg.length_stride) {
      for (std::size_t start = 0; start + len <= train.length; start += cfg.position_stride) {
        const CandidateRef ref{i, start, len};
        const auto values = values_of(train, ref);
        auto& bucket = seen[hash_values(values)];
        const bool duplicate = std::any_of(bucket.begin(), bucket.end(), [&](std::size_t k) {
          const auto other = values_of(train, out[k]);
          return other.size() == values.size() && std::equal(other.begin(), other.end(), values.begin());
        });
        if (duplicate) continue;
        bucket.push_back(out.size());
        out.push_back(ref);
      }
    }
  }
  return out;
}

std::vector<Shapelet> generate_candidates(const Dataset& train, const MiningConfig& cfg) {
  std::vector<Shapelet> out;
  for (const auto& ref : enumerate_candidates(train, cfg)) {
    Shapelet s;
    s.source_series = ref.series;
    s.start = ref.start;
    s.length = ref.length;
    s.class_label = train.series[ref.series].label;
    const auto values = values_of(train, ref);
    s.values.assign(values.begin(), values.end());
    out.push_back(std::move(s));
  }
  return out;
}

double entropy(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

std::vector<OrderlineEntry> orderline(std::span<const double> shapelet, const Dataset& train,
                                      const DistanceConfig& cfg) {
  std::vector<OrderlineEntry> ol;
  ol.reserve(train.size());
  for (std::size_t j = 0; j < train.size(); ++j) {
    ol.push_back({subsequence_dist(train.series[j].values, shapelet, cfg), train.series[j].label, j});
  }
  std::stable_sort(ol.begin(), ol.end(),
                   [](const auto& a, const auto& b) { return a.distance < b.distance; });
  return ol;
}

Split best_split(std::span<const OrderlineEntry> ol, std::size_t label_count) {
  Split out;
  const std::size_t n = ol.size();
  if (n == 0) {
    out.degenerate = true;
    return out;
  }
  std::vector<std::size_t> total(label_count, 0);
  double sum_all = 0.0;
  for (const auto& e : ol) {
    ++total.at(static_cast<std::size_t>(e.label));
    sum_all += e.distance;
  }
  const auto present = std::count_if(total.begin(), total.end(), [](auto c) { return c > 0; });

  auto gap_at = [&](double threshold) {
    double below = 0.0, above = 0.0;
    std::size_t nb = 0, na = 0;
    for (const auto& e : ol) {
      if (e.distance <= threshold) {
        below += e.distance;
        ++nb;
      } else {
        above += e.distance;
        ++na;
      }
    }
    if (nb == 0 || na == 0) return 0.0;
    return above / static_cast<double>(na) - below / static_cast<double>(nb);
  };

  if (present < 2) {
    out.degenerate = true;
    out.threshold = 0.5 * (ol.front().distance + ol.back().distance);
    out.gap = gap_at(out.threshold);
    return out;
  }

  const double parent = entropy(total);
  const double dn = static_cast<double>(n);

  struct Cut {
    double threshold, gain, gap;
  };
  std::vector<Cut> cuts;
  std::vector<std::size_t> left(label_count, 0), right = total;
  double sum_left = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto code = static_cast<std::size_t>(ol[i].label);
    ++left[code];
    --right[code];
    sum_left += ol[i].distance;
    if (!(ol[i].distance < ol[i + 1].distance)) continue;
    const double nl = static_cast<double>(i + 1);
    const double nr = dn - nl;
    const double gain = parent - (nl / dn) * entropy(left) - (nr / dn) * entropy(right);
    const double gap = (sum_all - sum_left) / nr - sum_left / nl;
    cuts.push_back({0.5 * (ol[i].distance + ol[i + 1].distance), std::max(0.0, gain), gap});
  }
  if (cuts.empty()) {
    out.degenerate = true;
    out.threshold = ol.front().distance;
    return out;
  }

  double max_gain = 0.0;
  for (const auto& c : cuts) max_gain = std::max(max_gain, c.gain);
  double max_gap = -std::numeric_limits<double>::infinity();
  for (const auto& c : cuts) {
    if (c.gain >= max_gain - kGainTieTolerance) max_gap = std::max(max_gap, c.gap);
  }
  // Cuts are in ascending threshold order, so the first match is the smallest d.
  for (const auto& c : cuts) {
    if (c.gain >= max_gain - kGainTieTolerance && c.gap >= max_gap - kGainTieTolerance) {
      out.threshold = c.threshold;
      out.gain = c.gain;
      out.gap = c.gap;
      break;
    }
  }
  return out;
}

namespace {

// Batched distances from every candidate of one source series to every
// training series. Sliding dot products are grown one sample at a time along
// the length axis, so each window pair costs O(1) per length.
class SourceScorer {
 public:
  SourceScorer(const Dataset& train, const LengthBand& band, const MiningConfig& cfg)
      : train_(train), band_(band), cfg_(cfg), m_(train.length) {
    for (std::size_t len = band.min_len; len <= band.max_len; len += cfg.length_stride) {
      lengths_.push_back(len);
    }
    // Window statistics per series, per evaluated length, per start.
    stats_.resize(train.size());
    for (std::size_t j = 0; j < train.size(); ++j) {
      const std::span<const double> y(train.series[j].values);
      auto& per_len = stats_[j];
      per_len.resize(lengths_.size());
      for (std::size_t li = 0; li < lengths_.size(); ++li) {
        const std::size_t len = lengths_[li];
        auto& ws = per_len[li];
        ws.resize(m_ - len + 1);
        for (std::size_t b = 0; b + len <= m_; ++b) {
          const auto window = y.subspan(b, len);
          Stat s;
          const auto st = window_stats(window);
          s.mean = st.mean;
          s.stddev = st.stddev;
          s.flat = st.flat();
          double sq = 0.0;
          for (double v : window) sq += v * v;
          s.sumsq = sq;
          ws[b] = s;
        }
      }
    }
  }

  std::size_t length_count() const { return lengths_.size(); }
  std::size_t length_at(std::size_t li) const { return lengths_[li]; }

  /// dist[(li * m + a) * n + j] for source series i; only entries with
  /// wanted[li * m + a] set are computed.
  void score_source(std::size_t i, const std::vector<char>& wanted, std::vector<double>& dist) const {
    const std::size_t n = train_.size();
    dist.assign(lengths_.size() * m_ * n, 0.0);
    std::vector<char> row_needed(m_, 0);
    for (std::size_t li = 0; li < lengths_.size(); ++li) {
      for (std::size_t a = 0; a + lengths_[li] <= m_; ++a) {
        if (wanted[li * m_ + a]) row_needed[a] = 1;
      }
    }
    const std::span<const double> x(train_.series[i].values);
    const std::size_t l0 = band_.min_len;
    const std::size_t width = m_ - l0 + 1;
    std::vector<double> dot(width * width);
    std::vector<double> scaled_mean(width), inv_std(width);

    for (std::size_t j = 0; j < n; ++j) {
      const std::span<const double> y(train_.series[j].values);
      for (std::size_t a = 0; a < width; ++a) {
        if (!row_needed[a]) continue;
        double* row = &dot[a * width];
        for (std::size_t b = 0; b < width; ++b) {
          double s = 0.0;
          for (std::size_t t = 0; t < l0; ++t) s += x[a + t] * y[b + t];
          row[b] = s;
        }
      }
      std::size_t li = 0;
      for (std::size_t len = l0; len <= band_.max_len; ++len) {
        const std::size_t valid = m_ - len + 1;
        if (li < lengths_.size() && lengths_[li] == len) {
          evaluate(i, j, li, valid, wanted, dot, width, scaled_mean, inv_std, dist);
          ++li;
        }
        if (len == band_.max_len) break;
        // Extend every window pair by one sample: valid starts shrink by one.
        for (std::size_t a = 0; a + 1 < valid; ++a) {
          if (!row_needed[a]) continue;
          double* row = &dot[a * width];
          const double xa = x[a + len];
          const double* yl = &y[len];
          for (std::size_t b = 0; b + 1 < valid; ++b) row[b] += xa * yl[b];
        }
      }
    }
  }

 private:
  struct Stat {
    double mean = 0.0, stddev = 0.0, sumsq = 0.0;
    bool flat = false;
  };

  void evaluate(std::size_t i, std::size_t j, std::size_t li, std::size_t valid,
                const std::vector<char>& wanted, const std::vector<double>& dot, std::size_t width,
                std::vector<double>& scaled_mean, std::vector<double>& inv_std,
                std::vector<double>& dist) const {
    const std::size_t n = train_.size();
    const std::size_t len = lengths_[li];
    const double dlen = static_cast<double>(len);
    const double scale = cfg_.distance.length_normalize ? dlen : 1.0;
    const auto& src = stats_[i][li];
    const auto& dst = stats_[j][li];

    bool any_flat = false;
    for (std::size_t b = 0; b < valid; ++b) {
      if (dst[b].flat) {
        any_flat = true;
        scaled_mean[b] = 0.0;
        inv_std[b] = 0.0;
      } else {
        scaled_mean[b] = dlen * dst[b].mean;
        inv_std[b] = 1.0 / dst[b].stddev;
      }
    }

    for (std::size_t a = 0; a < valid; ++a) {
      if (!wanted[li * m_ + a]) continue;
      const double* row = &dot[a * width];
      double best_sum;
      if (cfg_.distance.normalize_windows) {
        if (src[a].flat) {
          best_sum = any_flat ? 0.0 : dlen;
        } else {
          const double mu = src[a].mean;
          double best = -std::numeric_limits<double>::infinity();
          if (!any_flat) {
            for (std::size_t b = 0; b < valid; ++b) {
              const double v = (row[b] - mu * scaled_mean[b]) * inv_std[b];
              best = v > best ? v : best;
            }
          } else {
            for (std::size_t b = 0; b < valid; ++b) {
              if (dst[b].flat) continue;
              const double v = (row[b] - mu * scaled_mean[b]) * inv_std[b];
              best = v > best ? v : best;
            }
          }
          const double corr = best / (dlen * src[a].stddev);
          best_sum = std::max(0.0, 2.0 * dlen * (1.0 - corr));
          if (any_flat) best_sum = std::min(best_sum, dlen);
        }
      } else {
        double best = std::numeric_limits<double>::infinity();
        const double ssa = src[a].sumsq;
        for (std::size_t b = 0; b < valid; ++b) {
          const double v = ssa + dst[b].sumsq - 2.0 * row[b];
          best = v < best ? v : best;
        }
        best_sum = std::max(0.0, best);
      }
      if (i == j) best_sum = 0.0;  // the candidate's own window
      dist[(li * m_ + a) * n + j] = best_sum / scale;
    }
  }

  const Dataset& train_;
  LengthBand band_;
  const MiningConfig& cfg_;
  std::size_t m_;
  std::vector<std::size_t> lengths_;
  std::vector<std::vector<std::vector<Stat>>> stats_;
};

}  // namespace

std::vector<ScoredCandidate> mine_scored(const Dataset& train, const MiningConfig& cfg,
                                         std::vector<std::string>* warnings) {
  const auto band = resolve_band(train.length, cfg);
  auto refs = enumerate_candidates(train, cfg);
  if (cfg.use_sax_filter) {
    auto filtered = sax_filter(train, refs, cfg.sax);
    if (warnings) warnings->insert(warnings->end(), filtered.warnings.begin(), filtered.warnings.end());
    refs = std::move(filtered.kept);
  }

  const std::size_t n = train.size();
  const std::size_t m = train.length;
  SourceScorer scorer(train, band, cfg);
  const std::size_t lcount = scorer.length_count();
  std::vector<std::size_t> len_index(band.max_len + 1, SIZE_MAX);
  for (std::size_t li = 0; li < lcount; ++li) len_index[scorer.length_at(li)] = li;

  std::vector<std::vector<char>> wanted(n, std::vector<char>(lcount * m, 0));
  for (const auto& r : refs) wanted[r.series][len_index[r.length] * m + r.start] = 1;

  std::vector<std::vector<ScoredCandidate>> per_source(n);
  const std::size_t label_count = train.label_names.size();
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    std::vector<double> dist;
    scorer.score_source(i, wanted[i], dist);
    std::vector<OrderlineEntry> ol(n);
    auto& out = per_source[i];
    for (std::size_t li = 0; li < lcount; ++li) {
      for (std::size_t a = 0; a < m; ++a) {
        if (!wanted[i][li * m + a]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          ol[j] = {dist[(li * m + a) * n + j], train.series[j].label, j};
        }
        std::stable_sort(ol.begin(), ol.end(),
                         [](const auto& x, const auto& y) { return x.distance < y.distance; });
        const auto split = best_split(ol, label_count);
        ScoredCandidate c;
        c.source_series = i;
        c.start = a;
        c.length = scorer.length_at(li);
        c.class_label = train.series[i].label;
        c.split_threshold = split.threshold;
        c.gain = split.gain;
        c.gap = split.gap;
        out.push_back(c);
      }
    }
  });

  std::vector<ScoredCandidate> all;
  for (auto& v : per_source) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end(), mining_order);
  return all;
}

Shapelet materialize(const Dataset& train, const ScoredCandidate& c) {
  Shapelet s;
  static_cast<ScoredCandidate&>(s) = c;
  const auto values = values_of(train, {c.source_series, c.start, c.length});
  s.values.assign(values.begin(), values.end());
  return s;
}

std::vector<Shapelet> mine_shapelets(const Dataset& train, const MiningConfig& cfg) {
  const auto scored = mine_scored(train, cfg);
  std::vector<Shapelet> out;
  out.reserve(scored.size());
  for (const auto& c : scored) out.push_back(materialize(train, c));
  return out;
}

void write_candidate_dump(std::ostream& out, const Dataset& train,
                          std::span<const ScoredCandidate> candidates) {
  out << "source_id,start,length,class,gain,threshold,gap,values\n";
  std::ostringstream line;
  line.precision(17);
  for (const auto& c : candidates) {
    line.str({});
    line << c.source_series << ',' << c.start << ',' << c.length << ','
         << train.label_names.at(static_cast<std::size_t>(c.class_label)) << ',' << c.gain << ','
         << c.split_threshold << ',' << c.gap << ',';
    const auto values = values_of(train, {c.source_series, c.start, c.length});
    for (std::size_t k = 0; k < values.size(); ++k) line << (k ? " " : "") << values[k];
    out << line.str() << '\n';
  }
}

}  // namespace divshap
