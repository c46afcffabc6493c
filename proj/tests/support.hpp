#ifndef GRAPHSI_TESTS_SUPPORT_HPP
#define GRAPHSI_TESTS_SUPPORT_HPP

// Shared test helpers: random instances and oracles written independently of
// the library code paths they check.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "graphsi/graphsi.hpp"

namespace testing_support {

using namespace graphsi;

inline std::string data_path(const std::string& name) { return std::string(GRAPHSI_DATA_DIR) + "/" + name; }

struct Instance {
  Graph graph;
  GnnModel model;
};

/// Random graph of the given kind (0 path, 1 tree, 2 er) with n nodes.
inline Graph random_graph(int kind, std::size_t n, std::size_t d0, std::uint64_t seed) {
  GraphSpec spec;
  spec.kind = kind == 0 ? GraphKind::path : (kind == 1 ? GraphKind::tree : GraphKind::er);
  spec.n = n;
  spec.d0 = d0;
  spec.seed = seed;
  spec.p = 0.3;
  return generate_graph(spec);
}

inline GnnModel random_model(bool gin, std::size_t layers, std::size_t d0, std::uint64_t seed, bool mlp2 = false,
                             std::size_t hidden = 4) {
  ModelSpec spec;
  spec.conv = gin ? ConvKind::gin : ConvKind::gcn;
  spec.layers = layers;
  spec.hidden = hidden;
  spec.d0 = d0;
  spec.d_out = 2;
  spec.seed = seed;
  spec.mlp2_readout = mlp2;
  return generate_model(spec);
}

/// The i-th case of a deterministic family of mixed instances with n <= 12.
inline Instance random_instance(std::uint64_t i) {
  auto rng = SplitMix64::stream(0xC0FFEE, i);
  const int kind = static_cast<int>(i % 3);
  const std::size_t n = 3 + rng.below(10);
  const std::size_t d0 = 1 + rng.below(3);
  const std::size_t layers = 1 + rng.below(3);
  const bool gin = rng.bernoulli(0.5);
  return {random_graph(kind, n, d0, rng.next()), random_model(gin, layers, d0, rng.next())};
}

/// All-pairs hop distances by Floyd-Warshall.
inline std::vector<std::vector<std::size_t>> hop_distances(const Graph& g) {
  const std::size_t n = g.num_nodes();
  const std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& e : g.edges()) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  return d;
}

inline std::vector<std::uint64_t> hood_masks(const Graph& g, std::size_t ell) {
  const auto d = hop_distances(g);
  std::vector<std::uint64_t> masks(g.num_nodes(), 0);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    for (std::size_t j = 0; j < g.num_nodes(); ++j) {
      if (d[i][j] <= ell) masks[i] |= std::uint64_t{1} << j;
    }
  }
  return masks;
}

/// Membership of every mask of N in the union of hood power sets.
inline std::vector<char> interaction_membership(const Graph& g, std::size_t ell) {
  const auto masks = hood_masks(g, ell);
  std::vector<char> in(std::size_t{1} << g.num_nodes(), 0);
  for (std::uint64_t t = 0; t < in.size(); ++t) {
    for (auto h : masks) {
      if ((t & ~h) == 0) {
        in[t] = 1;
        break;
      }
    }
  }
  return in;
}

/// Full game table indexed by coalition mask.
template <class G>
std::vector<double> game_table(G& game) {
  const std::size_t n = game.num_players();
  std::vector<double> table(std::size_t{1} << n);
  for (std::uint64_t t = 0; t < table.size(); ++t) table[t] = game.evaluate(Coalition(t));
  return table;
}

/// Möbius transform of a full table by the fast subset-sum inversion.
inline std::vector<double> fast_moebius(std::vector<double> f, std::size_t n) {
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t t = 0; t < f.size(); ++t) {
      if (t & (std::size_t{1} << b)) f[t] -= f[t ^ (std::size_t{1} << b)];
    }
  }
  return f;
}

/// Inverse of fast_moebius.
inline std::vector<double> fast_zeta(std::vector<double> f, std::size_t n) {
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t t = 0; t < f.size(); ++t) {
      if (t & (std::size_t{1} << b)) f[t] += f[t ^ (std::size_t{1} << b)];
    }
  }
  return f;
}

/// Random game table on n players.
inline std::vector<double> random_table(std::size_t n, std::uint64_t seed) {
  auto rng = SplitMix64::stream(seed, 7);
  std::vector<double> t(std::size_t{1} << n);
  for (double& v : t) v = rng.normal();
  return t;
}

inline FunctionGame table_game(const std::vector<double>& table, std::size_t n) {
  return FunctionGame(n, [table](Coalition c) { return table[c.bits()]; });
}

}  // namespace testing_support

#endif  // GRAPHSI_TESTS_SUPPORT_HPP
