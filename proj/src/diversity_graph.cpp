#include "divshap/diversity_graph.hpp"

#include <algorithm>
#include <ostream>

#include "divshap/mining.hpp"
#include "divshap/parallel.hpp"

namespace divshap {

bool similar(const Shapelet& a, const Shapelet& b, const DistanceConfig& cfg, bool same_class_only) {
  if (same_class_only && a.class_label != b.class_label) return false;
  const double bound = std::min(a.split_threshold, b.split_threshold);
  return shapelet_dist(a.view(), b.view(), cfg, bound) <= bound;
}

DiversityGraph::DiversityGraph(std::vector<Shapelet> vertices,
                               std::vector<std::vector<std::size_t>> adjacency)
    : vertices_(std::move(vertices)), adjacency_(std::move(adjacency)) {
  if (adjacency_.size() != vertices_.size()) {
    throw Error(ErrorCode::InvalidArgument, "adjacency size differs from vertex count");
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

bool DiversityGraph::adjacent(std::size_t i, std::size_t j) const {
  const auto& adj = adjacency_.at(i);
  return std::binary_search(adj.begin(), adj.end(), j);
}

std::size_t DiversityGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& adj : adjacency_) total += adj.size();
  return total / 2;
}

DiversityGraph build_graph(std::vector<Shapelet> sorted, const GraphConfig& cfg) {
  const std::size_t n = sorted.size();
  std::vector<std::vector<std::size_t>> upper(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (similar(sorted[i], sorted[j], cfg.distance, cfg.same_class_only)) upper[i].push_back(j);
    }
  });
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : upper[i]) {
      adjacency[i].push_back(j);
      adjacency[j].push_back(i);
    }
  }
  return DiversityGraph(std::move(sorted), std::move(adjacency));
}

LazyDiversityGraph::LazyDiversityGraph(const Dataset& train, std::vector<ScoredCandidate> sorted,
                                       GraphConfig cfg)
    : train_(&train), candidates_(std::move(sorted)), cfg_(cfg) {}

const Shapelet& LazyDiversityGraph::vertex(std::size_t i) const {
  auto it = cache_.find(i);
  if (it == cache_.end()) it = cache_.emplace(i, materialize(*train_, candidates_.at(i))).first;
  return it->second;
}

bool LazyDiversityGraph::adjacent(std::size_t i, std::size_t j) const {
  if (i == j) return false;
  const auto& a = candidates_.at(i);
  const auto& b = candidates_.at(j);
  if (cfg_.same_class_only && a.class_label != b.class_label) return false;
  ++evaluated_;
  return similar(vertex(i), vertex(j), cfg_.distance, cfg_.same_class_only);
}

std::vector<Shapelet> div_topk(const DiversityGraph& g, std::size_t k) {
  std::vector<Shapelet> out;
  for (auto i : div_topk_indices(g, k)) out.push_back(g.vertex(i));
  return out;
}

std::vector<Shapelet> div_topk(const LazyDiversityGraph& g, std::size_t k) {
  std::vector<Shapelet> out;
  for (auto i : div_topk_indices(g, k)) out.push_back(g.vertex(i));
  return out;
}

void write_graph_dump(std::ostream& edges, std::ostream& vertices, const DiversityGraph& g,
                      const Dataset& train) {
  edges << "i,j\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j : g.neighbors(i)) {
      if (i < j) edges << i << ',' << j << '\n';
    }
  }
  const auto precision = vertices.precision(17);
  vertices << "index,source_id,start,length,gain,threshold,class\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& v = g.vertex(i);
    vertices << i << ',' << v.source_series << ',' << v.start << ',' << v.length << ',' << v.gain
             << ',' << v.split_threshold << ','
             << train.label_names.at(static_cast<std::size_t>(v.class_label)) << '\n';
  }
  vertices.precision(precision);
}

}  // namespace divshap
