#include "divshap/transform.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "divshap/error.hpp"
#include "divshap/parallel.hpp"

namespace divshap {

std::string shapelet_id(const ScoredCandidate& s) {
  std::ostringstream os;
  os << 's' << s.source_series << '_' << s.start << '_' << s.length;
  return os.str();
}

FeatureMatrix transform(const Dataset& d, std::span<const Shapelet> shapelets,
                        const DistanceConfig& cfg, std::size_t workers) {
  for (const auto& s : shapelets) {
    if (s.values.size() > d.length) {
      throw Error(ErrorCode::ShapeletLongerThanSeries,
                  shapelet_id(s) + " is longer than series length " + std::to_string(d.length));
    }
  }
  FeatureMatrix fm;
  fm.values.resize(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(shapelets.size()));
  parallel_for(d.size(), workers, [&](std::size_t i) {
    for (std::size_t j = 0; j < shapelets.size(); ++j) {
      fm.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          subsequence_dist(d.series[i].values, shapelets[j].values, cfg);
    }
  });
  for (const auto& s : d.series) fm.labels.push_back(s.label);
  for (const auto& s : shapelets) fm.column_ids.push_back(shapelet_id(s));
  return fm;
}

FeatureMatrix raw_features(const Dataset& d) {
  FeatureMatrix fm;
  fm.values.resize(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.length));
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t t = 0; t < d.length; ++t) {
      fm.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = d.series[i].values[t];
    }
    fm.labels.push_back(d.series[i].label);
  }
  for (std::size_t t = 0; t < d.length; ++t) fm.column_ids.push_back("t" + std::to_string(t));
  return fm;
}

FeatureMatrix leading_columns(const FeatureMatrix& fm, std::size_t k) {
  k = std::min(k, fm.cols());
  FeatureMatrix out;
  out.values = fm.values.leftCols(static_cast<Eigen::Index>(k));
  out.labels = fm.labels;
  out.column_ids.assign(fm.column_ids.begin(), fm.column_ids.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

FeatureMatrix select_rows(const FeatureMatrix& fm, std::span<const std::size_t> rows) {
  FeatureMatrix out;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), fm.values.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.values.row(static_cast<Eigen::Index>(r)) = fm.values.row(static_cast<Eigen::Index>(rows[r]));
    out.labels.push_back(fm.labels.at(rows[r]));
  }
  out.column_ids = fm.column_ids;
  return out;
}

MinMaxScaling fit_scaling(const FeatureMatrix& fm) {
  MinMaxScaling s;
  for (Eigen::Index c = 0; c < fm.values.cols(); ++c) {
    if (fm.values.rows() == 0) {
      s.min.push_back(0.0);
      s.max.push_back(0.0);
      continue;
    }
    s.min.push_back(fm.values.col(c).minCoeff());
    s.max.push_back(fm.values.col(c).maxCoeff());
  }
  return s;
}

FeatureMatrix apply_scaling(const FeatureMatrix& fm, const MinMaxScaling& scaling) {
  if (scaling.min.size() != fm.cols() || scaling.max.size() != fm.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "scaling has " + std::to_string(scaling.min.size()) +
                                                  " columns, features have " +
                                                  std::to_string(fm.cols()));
  }
  FeatureMatrix out = fm;
  for (Eigen::Index c = 0; c < out.values.cols(); ++c) {
    const double lo = scaling.min[static_cast<std::size_t>(c)];
    const double range = scaling.max[static_cast<std::size_t>(c)] - lo;
    for (Eigen::Index r = 0; r < out.values.rows(); ++r) {
      double& x = out.values(r, c);
      x = range > 0.0 ? std::clamp((x - lo) / range, 0.0, 1.0) : 0.0;
    }
  }
  return out;
}

void write_features_csv(std::ostream& out, const FeatureMatrix& fm,
                        const std::vector<std::string>& label_names) {
  for (const auto& id : fm.column_ids) out << id << ',';
  out << "label\n";
  std::ostringstream line;
  line.precision(17);
  for (Eigen::Index r = 0; r < fm.values.rows(); ++r) {
    line.str({});
    for (Eigen::Index c = 0; c < fm.values.cols(); ++c) line << fm.values(r, c) << ',';
    line << label_names.at(static_cast<std::size_t>(fm.labels.at(static_cast<std::size_t>(r))));
    out << line.str() << '\n';
  }
}

}  // namespace divshap
