#pragma once

#include <cstddef>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "divshap/dataset.hpp"
#include "divshap/distance.hpp"
#include "divshap/error.hpp"
#include "divshap/shapelet.hpp"

namespace divshap {

struct GraphConfig {
  DistanceConfig distance;
  bool same_class_only = true;
  std::size_t workers = 1;
};

/// Two shapelets are similar when (optionally) they share a class and their
/// distance is at most the smaller of their split thresholds.
bool similar(const Shapelet& a, const Shapelet& b, const DistanceConfig& cfg, bool same_class_only);

/// Score-ordered shapelets with undirected "similar" edges.
class DiversityGraph {
 public:
  DiversityGraph() = default;
  DiversityGraph(std::vector<Shapelet> vertices, std::vector<std::vector<std::size_t>> adjacency);

  std::size_t size() const noexcept { return vertices_.size(); }
  const Shapelet& vertex(std::size_t i) const { return vertices_.at(i); }
  const std::vector<Shapelet>& vertices() const noexcept { return vertices_; }
  /// Sorted neighbor indices.
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_.at(i); }
  bool adjacent(std::size_t i, std::size_t j) const;
  std::size_t edge_count() const;

 private:
  std::vector<Shapelet> vertices_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Full O(n^2) pair scan over `sorted` (expected in mining order).
DiversityGraph build_graph(std::vector<Shapelet> sorted, const GraphConfig& cfg);

/// Graph over a mined candidate list whose edges are evaluated only when
/// queried. Vertices are materialized from the training set on first use.
/// Greedy top-k touches a handful of pairs per scanned vertex, which keeps
/// selection over hundreds of thousands of candidates tractable.
class LazyDiversityGraph {
 public:
  LazyDiversityGraph(const Dataset& train, std::vector<ScoredCandidate> sorted, GraphConfig cfg);

  std::size_t size() const noexcept { return candidates_.size(); }
  const Shapelet& vertex(std::size_t i) const;
  bool adjacent(std::size_t i, std::size_t j) const;
  std::size_t evaluated_pairs() const noexcept { return evaluated_; }

 private:
  const Dataset* train_;
  std::vector<ScoredCandidate> candidates_;
  GraphConfig cfg_;
  mutable std::unordered_map<std::size_t, Shapelet> cache_;
  mutable std::size_t evaluated_ = 0;
};

/// Greedy diversified top-k in vertex order: a vertex is taken when it has no
/// edge to any vertex taken before it. Returns indices; may hold fewer than k.
template <class Graph>
std::vector<std::size_t> div_topk_indices(const Graph& g, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < g.size() && selected.size() < k; ++i) {
    bool independent = true;
    for (std::size_t j : selected) {
      if (g.adjacent(i, j)) {
        independent = false;
        break;
      }
    }
    if (independent) selected.push_back(i);
  }
  return selected;
}

std::vector<Shapelet> div_topk(const DiversityGraph& g, std::size_t k);
std::vector<Shapelet> div_topk(const LazyDiversityGraph& g, std::size_t k);

/// Edge list CSV (i,j with i<j) and vertex table CSV (index,gain,threshold,class).
void write_graph_dump(std::ostream& edges, std::ostream& vertices, const DiversityGraph& g,
                      const Dataset& train);

}  // namespace divshap
