#ifndef GRAPHSI_GNN_HPP
#define GRAPHSI_GNN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "graphsi/coalition.hpp"
#include "graphsi/errors.hpp"
#include "graphsi/graph.hpp"
#include "graphsi/matrix.hpp"

namespace graphsi {

/// Affine map y = x W + b with W of shape (in, out).
struct DenseLayer {
  Matrix weight;
  std::vector<double> bias;

  std::size_t in_dim() const { return weight.rows(); }
  std::size_t out_dim() const { return weight.cols(); }

  void validate(const std::string& where) const {
    if (weight.rows() == 0 || weight.cols() == 0) throw DimensionError(where + ": empty weight matrix");
    if (bias.size() != weight.cols()) {
      throw DimensionError(where + ": bias has length " + std::to_string(bias.size()) +
                           ", expected " + std::to_string(weight.cols()));
    }
    for (double w : weight.data()) {
      if (!std::isfinite(w)) throw InputError(where + ": non-finite weight");
    }
    for (double b : bias) {
      if (!std::isfinite(b)) throw InputError(where + ": non-finite bias");
    }
  }
};

/// Two affine maps with a ReLU in between.
struct Mlp2 {
  DenseLayer hidden;
  DenseLayer output;

  void validate(const std::string& where) const {
    hidden.validate(where + " hidden");
    output.validate(where + " output");
    if (output.in_dim() != hidden.out_dim()) {
      throw DimensionError(where + ": output input width " + std::to_string(output.in_dim()) +
                           " does not match hidden width " + std::to_string(hidden.out_dim()));
    }
  }
  std::size_t in_dim() const { return hidden.in_dim(); }
  std::size_t out_dim() const { return output.out_dim(); }
};

/// Symmetric-normalized graph convolution: H' = D^-1/2 (A + I) D^-1/2 H W + b.
struct GcnConv {
  DenseLayer dense;
};

/// Graph isomorphism convolution: h'_i = MLP((1 + eps) h_i + sum_{j in N(i)} h_j).
struct GinConv {
  double epsilon = 0.0;
  Mlp2 mlp;
};

using ConvLayer = std::variant<GcnConv, GinConv>;

enum class Pooling { sum, mean };

struct LinearReadout {
  DenseLayer dense;
};

/// Readout is either affine or a 2-layer perceptron; only the affine one
/// keeps interactions inside receptive fields.
using Readout = std::variant<LinearReadout, Mlp2>;

inline std::size_t conv_in_dim(const ConvLayer& layer) {
  return std::visit([](const auto& l) {
    if constexpr (std::is_same_v<std::decay_t<decltype(l)>, GcnConv>) return l.dense.in_dim();
    else return l.mlp.in_dim();
  }, layer);
}

inline std::size_t conv_out_dim(const ConvLayer& layer) {
  return std::visit([](const auto& l) {
    if constexpr (std::is_same_v<std::decay_t<decltype(l)>, GcnConv>) return l.dense.out_dim();
    else return l.mlp.out_dim();
  }, layer);
}

/// Conv stack + pooling + readout. ReLU sits between conv layers, never after
/// the last one. Immutable once constructed.
class GnnModel {
 public:
  GnnModel(std::vector<ConvLayer> layers, Pooling pooling, Readout readout)
      : layers_(std::move(layers)), pooling_(pooling), readout_(std::move(readout)) {
    if (layers_.empty()) throw DimensionError("model needs at least one conv layer");
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      const std::string where = "layer " + std::to_string(k + 1);
      std::visit([&](const auto& l) {
        if constexpr (std::is_same_v<std::decay_t<decltype(l)>, GcnConv>) {
          l.dense.validate(where);
        } else {
          if (!std::isfinite(l.epsilon)) throw InputError(where + ": non-finite epsilon");
          l.mlp.validate(where);
        }
      }, layers_[k]);
      if (k > 0 && conv_in_dim(layers_[k]) != conv_out_dim(layers_[k - 1])) {
        throw DimensionError(where + ": input width " + std::to_string(conv_in_dim(layers_[k])) +
                             " does not match previous output width " +
                             std::to_string(conv_out_dim(layers_[k - 1])));
      }
    }
    std::visit([&](const auto& r) {
      if constexpr (std::is_same_v<std::decay_t<decltype(r)>, LinearReadout>) {
        r.dense.validate("readout");
        if (r.dense.in_dim() != embedding_dim()) {
          throw DimensionError("readout: input width " + std::to_string(r.dense.in_dim()) +
                               " does not match embedding width " + std::to_string(embedding_dim()));
        }
      } else {
        r.validate("readout");
        if (r.in_dim() != embedding_dim()) {
          throw DimensionError("readout: input width " + std::to_string(r.in_dim()) +
                               " does not match embedding width " + std::to_string(embedding_dim()));
        }
      }
    }, readout_);
  }

  const std::vector<ConvLayer>& layers() const { return layers_; }
  Pooling pooling() const { return pooling_; }
  const Readout& readout() const { return readout_; }

  std::size_t num_layers() const { return layers_.size(); }
  std::size_t input_dim() const { return conv_in_dim(layers_.front()); }
  std::size_t embedding_dim() const { return conv_out_dim(layers_.back()); }
  std::size_t output_dim() const {
    return std::visit([](const auto& r) {
      if constexpr (std::is_same_v<std::decay_t<decltype(r)>, LinearReadout>) return r.dense.out_dim();
      else return r.out_dim();
    }, readout_);
  }
  bool has_linear_readout() const { return std::holds_alternative<LinearReadout>(readout_); }

  void check_input(std::size_t d0) const {
    if (d0 != input_dim()) {
      throw DimensionError("layer 1: input width " + std::to_string(input_dim()) +
                           " does not match feature width " + std::to_string(d0));
    }
  }

 private:
  std::vector<ConvLayer> layers_;
  Pooling pooling_;
  Readout readout_;
};

/// Feature matrix with every node outside the coalition replaced by the
/// baseline vector. Topology is never touched.
class MaskedFeatures {
 public:
  MaskedFeatures(const Matrix& base, std::span<const double> baseline, Coalition coalition)
      : base_(&base), baseline_(baseline), coalition_(coalition) {
    if (baseline.size() != base.cols()) {
      throw DimensionError("baseline has length " + std::to_string(baseline.size()) +
                           ", expected feature width " + std::to_string(base.cols()));
    }
    if (base.rows() > kMaxPlayers) throw InfeasibleError("masking supports at most 64 nodes");
  }

  Coalition coalition() const { return coalition_; }

  Matrix realize() const {
    Matrix x = *base_;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (!coalition_.contains(i)) std::copy(baseline_.begin(), baseline_.end(), x.row(i).begin());
    }
    return x;
  }

 private:
  const Matrix* base_;
  std::span<const double> baseline_;
  Coalition coalition_;
};

namespace detail {

inline void affine_rows(const Matrix& in, const DenseLayer& dense, Matrix& out) {
  out = Matrix(in.rows(), dense.out_dim());
  for (std::size_t r = 0; r < in.rows(); ++r) {
    auto dst = out.row(r);
    std::copy(dense.bias.begin(), dense.bias.end(), dst.begin());
    const auto src = in.row(r);
    for (std::size_t a = 0; a < src.size(); ++a) {
      const double x = src[a];
      if (x == 0.0) continue;
      const auto w = dense.weight.row(a);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += x * w[c];
    }
  }
}

inline void relu_inplace(Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (double& v : m.row(r)) v = std::max(v, 0.0);
  }
}

inline std::vector<double> affine(std::span<const double> x, const DenseLayer& dense) {
  std::vector<double> y(dense.bias);
  for (std::size_t a = 0; a < x.size(); ++a) {
    const auto w = dense.weight.row(a);
    for (std::size_t c = 0; c < y.size(); ++c) y[c] += x[a] * w[c];
  }
  return y;
}

inline Matrix gcn_forward(const Graph& g, const Matrix& h, const GcnConv& layer) {
  const std::size_t n = g.num_nodes();
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(i) + 1));
  Matrix agg(n, h.cols());
  for (std::size_t i = 0; i < n; ++i) {
    auto dst = agg.row(i);
    const double self = inv_sqrt_deg[i] * inv_sqrt_deg[i];
    const auto hi = h.row(i);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = self * hi[c];
    for (std::size_t j : g.neighbors(i)) {
      const double w = inv_sqrt_deg[i] * inv_sqrt_deg[j];
      const auto hj = h.row(j);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += w * hj[c];
    }
  }
  Matrix out;
  affine_rows(agg, layer.dense, out);
  return out;
}

inline Matrix gin_forward(const Graph& g, const Matrix& h, const GinConv& layer) {
  const std::size_t n = g.num_nodes();
  Matrix agg(n, h.cols());
  for (std::size_t i = 0; i < n; ++i) {
    auto dst = agg.row(i);
    const auto hi = h.row(i);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = (1.0 + layer.epsilon) * hi[c];
    for (std::size_t j : g.neighbors(i)) {
      const auto hj = h.row(j);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += hj[c];
    }
  }
  Matrix hidden;
  affine_rows(agg, layer.mlp.hidden, hidden);
  relu_inplace(hidden);
  Matrix out;
  affine_rows(hidden, layer.mlp.output, out);
  return out;
}

}  // namespace detail

/// Final-layer node embeddings H^(ell) for an explicit feature matrix.
inline Matrix node_embeddings(const GnnModel& model, const Graph& g, const Matrix& x) {
  if (x.rows() != g.num_nodes()) throw DimensionError("feature rows do not match node count");
  model.check_input(x.cols());
  Matrix h = x;
  for (std::size_t k = 0; k < model.num_layers(); ++k) {
    h = std::visit([&](const auto& layer) {
      if constexpr (std::is_same_v<std::decay_t<decltype(layer)>, GcnConv>) return detail::gcn_forward(g, h, layer);
      else return detail::gin_forward(g, h, layer);
    }, model.layers()[k]);
    if (k + 1 < model.num_layers()) detail::relu_inplace(h);
  }
  return h;
}

/// Pools node embeddings and applies the readout.
inline std::vector<double> pool_and_readout(const GnnModel& model, const Matrix& embeddings) {
  std::vector<double> pooled(embeddings.cols(), 0.0);
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    const auto row = embeddings.row(i);
    for (std::size_t c = 0; c < pooled.size(); ++c) pooled[c] += row[c];
  }
  if (model.pooling() == Pooling::mean && embeddings.rows() > 0) {
    for (double& v : pooled) v /= static_cast<double>(embeddings.rows());
  }
  return std::visit([&](const auto& r) {
    if constexpr (std::is_same_v<std::decay_t<decltype(r)>, LinearReadout>) {
      return detail::affine(pooled, r.dense);
    } else {
      auto hidden = detail::affine(pooled, r.hidden);
      for (double& v : hidden) v = std::max(v, 0.0);
      return detail::affine(hidden, r.output);
    }
  }, model.readout());
}

inline std::vector<double> forward_graph(const GnnModel& model, const Graph& g, const Matrix& x) {
  return pool_and_readout(model, node_embeddings(model, g, x));
}

inline std::vector<double> forward_graph(const GnnModel& model, const Graph& g, const MaskedFeatures& masked) {
  return forward_graph(model, g, masked.realize());
}

inline std::vector<double> forward_node(const GnnModel& model, const Graph& g, const MaskedFeatures& masked,
                                        std::size_t i) {
  if (i >= g.num_nodes()) throw std::out_of_range("node index " + std::to_string(i) + " out of range");
  const Matrix h = node_embeddings(model, g, masked.realize());
  const auto row = h.row(i);
  return {row.begin(), row.end()};
}

/// Column-wise mean of the node features.
inline std::vector<double> default_baseline(const Graph& g) {
  const Matrix& x = g.features();
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += row[c];
  }
  for (double& v : mean) v /= static_cast<double>(x.rows());
  return mean;
}

}  // namespace graphsi

#endif  // GRAPHSI_GNN_HPP
