#ifndef GRAPHSI_GRAPH_HPP
#define GRAPHSI_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphsi/coalition.hpp"
#include "graphsi/errors.hpp"
#include "graphsi/matrix.hpp"

namespace graphsi {

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  bool operator==(const Edge&) const = default;
};

/// Simple undirected graph with a node-feature matrix.
///
/// Construction validates: n >= 1, no self-loops, no duplicate edges (in
/// either orientation), endpoints < n, and one feature row per node. Edges
/// are stored normalized (u < v) and sorted.
class Graph {
 public:
  Graph(std::size_t n, std::vector<Edge> edges, Matrix features)
      : n_(n), edges_(std::move(edges)), features_(std::move(features)), adjacency_(n) {
    if (n_ == 0) throw InputError("graph must have at least one node");
    if (features_.rows() != n_) {
      throw InputError("feature matrix has " + std::to_string(features_.rows()) +
                       " rows, expected " + std::to_string(n_));
    }
    for (auto& e : edges_) {
      if (e.u >= n_ || e.v >= n_) {
        throw InputError("edge {" + std::to_string(e.u) + "," + std::to_string(e.v) +
                         "} has an endpoint >= n");
      }
      if (e.u == e.v) throw InputError("self-loop on node " + std::to_string(e.u));
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
    for (std::size_t k = 1; k < edges_.size(); ++k) {
      if (edges_[k] == edges_[k - 1]) {
        throw InputError("duplicate edge {" + std::to_string(edges_[k].u) + "," +
                         std::to_string(edges_[k].v) + "}");
      }
    }
    for (const auto& e : edges_) {
      adjacency_[e.u].push_back(e.v);
      adjacency_[e.v].push_back(e.u);
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
  }

  /// Graph without meaningful features (one zero column per node).
  static Graph structure_only(std::size_t n, std::vector<Edge> edges) {
    return Graph(n, std::move(edges), Matrix(n, 1));
  }

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t feature_dim() const { return features_.cols(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Matrix& features() const { return features_; }
  std::span<const std::size_t> neighbors(std::size_t i) const { return adjacency_.at(i); }
  std::size_t degree(std::size_t i) const { return adjacency_.at(i).size(); }

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  Matrix features_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Relabels node i as perm[i]; features move with their node.
inline Graph permute_nodes(const Graph& g, std::span<const std::size_t> perm) {
  const std::size_t n = g.num_nodes();
  if (perm.size() != n) throw std::invalid_argument("permutation size mismatch");
  std::vector<Edge> edges;
  edges.reserve(g.num_edges());
  for (const auto& e : g.edges()) edges.push_back({perm[e.u], perm[e.v]});
  Matrix x(n, g.feature_dim());
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(g.features().row(i).begin(), g.features().row(i).end(), x.row(perm[i]).begin());
  }
  return Graph(n, std::move(edges), std::move(x));
}

/// Nodes within shortest-path distance `ell` of each node (sorted, each
/// including the node itself). Works for any n.
inline std::vector<std::vector<std::size_t>> neighborhood_members(const Graph& g, std::size_t ell) {
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::size_t> dist(n);
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  std::deque<std::size_t> queue;
  for (std::size_t src = 0; src < n; ++src) {
    std::fill(dist.begin(), dist.end(), kUnseen);
    dist[src] = 0;
    queue.assign(1, src);
    auto& hood = out[src];
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      hood.push_back(u);
      if (dist[u] == ell) continue;
      for (std::size_t v : g.neighbors(u)) {
        if (dist[v] != kUnseen) continue;
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
    std::sort(hood.begin(), hood.end());
  }
  return out;
}

/// Per-node ell-hop neighborhoods (receptive fields) as coalitions.
struct NeighborhoodIndex {
  std::size_t ell = 1;
  std::vector<Coalition> hoods;

  std::size_t num_nodes() const { return hoods.size(); }
  std::size_t max_size() const {
    std::size_t best = 0;
    for (auto h : hoods) best = std::max(best, h.size());
    return best;
  }
};

inline NeighborhoodIndex khop_neighborhoods(const Graph& g, std::size_t ell) {
  if (ell == 0) throw std::invalid_argument("ell must be >= 1");
  if (g.num_nodes() > kMaxPlayers) {
    throw InfeasibleError("neighborhood coalitions support at most 64 nodes, graph has " +
                          std::to_string(g.num_nodes()));
  }
  NeighborhoodIndex index{ell, {}};
  index.hoods.reserve(g.num_nodes());
  for (const auto& members : neighborhood_members(g, ell)) {
    Coalition hood;
    for (std::size_t j : members) hood = hood.with(j);
    index.hoods.push_back(hood);
  }
  return index;
}

struct GraphStats {
  std::size_t d_max = 0;
  std::size_t n_max = 0;  ///< largest ell-hop neighborhood
  double density = 0.0;
};

inline GraphStats graph_stats(const Graph& g, std::size_t ell) {
  if (ell == 0) throw std::invalid_argument("ell must be >= 1");
  GraphStats stats;
  const std::size_t n = g.num_nodes();
  for (std::size_t i = 0; i < n; ++i) stats.d_max = std::max(stats.d_max, g.degree(i));
  for (const auto& hood : neighborhood_members(g, ell)) stats.n_max = std::max(stats.n_max, hood.size());
  if (n > 1) {
    stats.density = static_cast<double>(g.num_edges()) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
  }
  return stats;
}

}  // namespace graphsi

#endif  // GRAPHSI_GRAPH_HPP
