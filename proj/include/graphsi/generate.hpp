#ifndef GRAPHSI_GENERATE_HPP
#define GRAPHSI_GENERATE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "graphsi/errors.hpp"
#include "graphsi/gnn.hpp"
#include "graphsi/graph.hpp"
#include "graphsi/random.hpp"

namespace graphsi {

enum class GraphKind { path, cycle, tree, er };

inline GraphKind parse_graph_kind(std::string_view name) {
  if (name == "path") return GraphKind::path;
  if (name == "cycle") return GraphKind::cycle;
  if (name == "tree") return GraphKind::tree;
  if (name == "er") return GraphKind::er;
  throw InputError("unknown graph kind '" + std::string(name) + "'");
}

inline std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::path: return "path";
    case GraphKind::cycle: return "cycle";
    case GraphKind::tree: return "tree";
    case GraphKind::er: return "er";
  }
  return "?";
}

struct GraphSpec {
  GraphKind kind = GraphKind::path;
  std::size_t n = 4;
  std::size_t d0 = 1;
  std::uint64_t seed = 0;
  double p = 0.2;               ///< edge probability (er)
  std::size_t max_degree = 3;   ///< degree cap (tree)
};

/// Seeded synthetic graph with standard-normal features.
///
/// Trees attach node v to a uniformly chosen earlier node whose degree is
/// still below max_degree. Erdős–Rényi draws every pair independently.
inline Graph generate_graph(const GraphSpec& spec) {
  if (spec.n == 0) throw InputError("n must be at least 1");
  if (spec.d0 == 0) throw InputError("d0 must be at least 1");
  std::vector<Edge> edges;
  auto rng = SplitMix64::stream(spec.seed, 0);
  switch (spec.kind) {
    case GraphKind::path:
      for (std::size_t i = 0; i + 1 < spec.n; ++i) edges.push_back({i, i + 1});
      break;
    case GraphKind::cycle:
      if (spec.n < 3) throw InputError("a cycle needs at least 3 nodes");
      for (std::size_t i = 0; i < spec.n; ++i) edges.push_back({i, (i + 1) % spec.n});
      break;
    case GraphKind::tree: {
      if (spec.max_degree < 2 && spec.n > 2) throw InputError("tree max degree must be at least 2");
      std::vector<std::size_t> degree(spec.n, 0);
      std::vector<std::size_t> open;
      for (std::size_t v = 1; v < spec.n; ++v) {
        open.clear();
        for (std::size_t u = 0; u < v; ++u) {
          if (degree[u] < spec.max_degree) open.push_back(u);
        }
        const std::size_t u = open[rng.below(open.size())];
        edges.push_back({u, v});
        ++degree[u];
        ++degree[v];
      }
      break;
    }
    case GraphKind::er:
      if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw InputError("edge probability must lie in [0, 1]");
      for (std::size_t u = 0; u < spec.n; ++u) {
        for (std::size_t v = u + 1; v < spec.n; ++v) {
          if (rng.bernoulli(spec.p)) edges.push_back({u, v});
        }
      }
      break;
  }
  Matrix features(spec.n, spec.d0);
  auto frng = SplitMix64::stream(spec.seed, 1);
  for (double& x : features.data()) x = frng.normal();
  return Graph(spec.n, std::move(edges), std::move(features));
}

enum class ConvKind { gcn, gin };

inline ConvKind parse_conv_kind(std::string_view name) {
  if (name == "gcn") return ConvKind::gcn;
  if (name == "gin") return ConvKind::gin;
  throw InputError("unknown model kind '" + std::string(name) + "'");
}

struct ModelSpec {
  ConvKind conv = ConvKind::gcn;
  std::size_t layers = 2;
  std::size_t hidden = 8;
  std::size_t d0 = 1;
  std::size_t d_out = 2;
  Pooling pooling = Pooling::sum;
  bool mlp2_readout = false;
  std::uint64_t seed = 0;
};

/// Weights ~ normal(0, 1/sqrt(fan_in)); biases use the same scale.
inline DenseLayer random_dense(std::size_t in, std::size_t out, SplitMix64& rng) {
  DenseLayer d;
  d.weight = Matrix(in, out);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& w : d.weight.data()) w = scale * rng.normal();
  d.bias.resize(out);
  for (double& b : d.bias) b = scale * rng.normal();
  return d;
}

/// Seeded random model. Layer k draws from its own stream, so a linear and
/// an mlp2 readout generated from the same seed share their conv stack.
inline GnnModel generate_model(const ModelSpec& spec) {
  if (spec.layers == 0) throw InputError("layers must be at least 1");
  if (spec.hidden == 0 || spec.d0 == 0 || spec.d_out == 0) throw InputError("widths must be at least 1");
  std::vector<ConvLayer> layers;
  std::size_t width = spec.d0;
  for (std::size_t k = 0; k < spec.layers; ++k) {
    auto rng = SplitMix64::stream(spec.seed, 100 + k);
    if (spec.conv == ConvKind::gcn) {
      layers.emplace_back(GcnConv{random_dense(width, spec.hidden, rng)});
    } else {
      GinConv gin;
      gin.mlp.hidden = random_dense(width, spec.hidden, rng);
      gin.mlp.output = random_dense(spec.hidden, spec.hidden, rng);
      layers.emplace_back(std::move(gin));
    }
    width = spec.hidden;
  }
  auto rng = SplitMix64::stream(spec.seed, 200);
  Readout readout = LinearReadout{};
  if (spec.mlp2_readout) {
    Mlp2 mlp;
    mlp.hidden = random_dense(width, spec.hidden, rng);
    mlp.output = random_dense(spec.hidden, spec.d_out, rng);
    readout = std::move(mlp);
  } else {
    readout = LinearReadout{random_dense(width, spec.d_out, rng)};
  }
  return GnnModel(std::move(layers), spec.pooling, std::move(readout));
}

}  // namespace graphsi

#endif  // GRAPHSI_GENERATE_HPP
