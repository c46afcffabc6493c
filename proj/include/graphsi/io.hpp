#ifndef GRAPHSI_IO_HPP
#define GRAPHSI_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "json.hpp"

#include "graphsi/conversion.hpp"
#include "graphsi/errors.hpp"
#include "graphsi/gnn.hpp"
#include "graphsi/graph.hpp"
#include "graphsi/interaction_values.hpp"

namespace graphsi {

/// Values smaller than this in magnitude are written as exact zeros.
inline constexpr double kPruneThreshold = 1e-12;

namespace detail {

using Json = nlohmann::json;

inline std::string number(double v) {
  if (!std::isfinite(v)) throw InputError("cannot serialize a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double pruned(double v) { return std::abs(v) < kPruneThreshold ? 0.0 : v; }

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError(what + ": " + e.what());
  }
}

inline const Json& field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(where + ": missing field '" + key + "'");
  return *it;
}

inline double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(where + ": non-finite number");
  return v;
}

inline std::size_t as_index(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned()) throw InputError(where + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

inline std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw InputError(where + ": expected a string");
  return j.get<std::string>();
}

inline std::vector<double> as_vector(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(as_number(x, where));
  return out;
}

inline Matrix as_matrix(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of rows");
  std::vector<std::vector<double>> rows;
  rows.reserve(j.size());
  for (const auto& r : j) rows.push_back(as_vector(r, where));
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw InputError(where + ": ragged matrix");
  }
  return Matrix::from_rows(rows);
}

inline void write_vector(std::ostream& out, std::span<const double> v) {
  out << '[';
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << number(v[i]);
  out << ']';
}

inline void write_matrix(std::ostream& out, const Matrix& m, const std::string& indent) {
  out << '[';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << (r ? "," : "") << '\n' << indent << "  ";
    write_vector(out, m.row(r));
  }
  out << '\n' << indent << ']';
}

inline void write_dense(std::ostream& out, const DenseLayer& d, const std::string& indent, const char* suffix) {
  out << indent << "\"weight" << suffix << "\": ";
  write_matrix(out, d.weight, indent);
  out << ",\n" << indent << "\"bias" << suffix << "\": ";
  write_vector(out, d.bias);
}

inline DenseLayer read_dense(const Json& obj, const std::string& where, const std::string& suffix) {
  DenseLayer d;
  const std::string w = "weight" + suffix, b = "bias" + suffix;
  d.weight = as_matrix(field(obj, w.c_str(), where), where + " " + w);
  d.bias = as_vector(field(obj, b.c_str(), where), where + " " + b);
  return d;
}

inline Mlp2 read_mlp2(const Json& obj, const std::string& where) {
  return Mlp2{read_dense(obj, where, "1"), read_dense(obj, where, "2")};
}

inline void write_mlp2(std::ostream& out, const Mlp2& m, const std::string& indent) {
  write_dense(out, m.hidden, indent, "1");
  out << ",\n";
  write_dense(out, m.output, indent, "2");
}

}  // namespace detail

// ---------------------------------------------------------------- graphs

/// {"n": N, "edges": [[u, v], ...], "features": [[...], ...]}. Unknown
/// fields are ignored.
inline Graph parse_graph(const std::string& text) {
  const auto j = detail::parse_json(text, "graph file");
  const std::size_t n = detail::as_index(detail::field(j, "n", "graph"), "graph n");
  const auto& edges_json = detail::field(j, "edges", "graph");
  const auto& features_json = detail::field(j, "features", "graph");
  if (!edges_json.is_array()) throw InputError("graph edges: expected an array");
  if (!features_json.is_array() || features_json.size() != n) {
    throw InputError("graph features: expected " + std::to_string(n) + " rows");
  }
  std::vector<Edge> edges;
  edges.reserve(edges_json.size());
  for (const auto& e : edges_json) {
    if (!e.is_array() || e.size() != 2) throw InputError("graph edges: each edge must be a pair");
    edges.push_back({detail::as_index(e[0], "graph edge"), detail::as_index(e[1], "graph edge")});
  }
  Matrix features = detail::as_matrix(features_json, "graph features");
  if (n > 0 && features.cols() == 0) throw InputError("graph features: rows are empty");
  return Graph(n, std::move(edges), std::move(features));
}

/// Optional extra block written under "meta" by the generator.
struct GraphMeta {
  std::string kind;
  std::uint64_t seed = 0;
  std::optional<double> p;
};

inline std::string graph_to_json(const Graph& g, const std::optional<GraphMeta>& meta = std::nullopt) {
  std::ostringstream out;
  out << "{\n  \"n\": " << g.num_nodes() << ",\n  \"edges\": [";
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    const auto& e = g.edges()[k];
    out << (k ? ", " : "") << '[' << e.u << ", " << e.v << ']';
  }
  out << "],\n  \"features\": ";
  detail::write_matrix(out, g.features(), "  ");
  if (meta) {
    const auto stats = graph_stats(g, 1);
    out << ",\n  \"meta\": {\"kind\": \"" << meta->kind << "\", \"seed\": " << meta->seed;
    if (meta->p) out << ", \"p\": " << detail::number(*meta->p);
    out << ", \"num_edges\": " << g.num_edges() << ", \"density\": " << detail::number(stats.density) << '}';
  }
  out << "\n}\n";
  return out.str();
}

// ---------------------------------------------------------------- weights

/// {"activation": "relu", "layers": [...], "pooling": "sum"|"mean",
///  "readout": {"kind": "linear", "weight", "bias"} |
///             {"kind": "mlp2", "weight1", "bias1", "weight2", "bias2"}}
/// with layers {"kind": "gcn", "weight", "bias"} or
/// {"kind": "gin", "epsilon", "mlp": {"weight1", "bias1", "weight2", "bias2"}}.
inline GnnModel parse_model(const std::string& text) {
  using namespace detail;
  const auto j = parse_json(text, "weights file");
  if (as_string(field(j, "activation", "weights"), "weights activation") != "relu") {
    throw InputError("weights activation: only \"relu\" is supported");
  }
  const auto& layers_json = field(j, "layers", "weights");
  if (!layers_json.is_array()) throw InputError("weights layers: expected an array");
  std::vector<ConvLayer> layers;
  for (std::size_t k = 0; k < layers_json.size(); ++k) {
    const std::string where = "layer " + std::to_string(k + 1);
    const auto& lj = layers_json[k];
    const std::string kind = as_string(field(lj, "kind", where), where + " kind");
    if (kind == "gcn") {
      layers.emplace_back(GcnConv{read_dense(lj, where, "")});
    } else if (kind == "gin") {
      GinConv gin;
      gin.epsilon = as_number(field(lj, "epsilon", where), where + " epsilon");
      gin.mlp = read_mlp2(field(lj, "mlp", where), where + " mlp");
      layers.emplace_back(std::move(gin));
    } else {
      throw InputError(where + ": unknown layer kind '" + kind + "'");
    }
  }
  const std::string pooling_name = as_string(field(j, "pooling", "weights"), "weights pooling");
  Pooling pooling;
  if (pooling_name == "sum") {
    pooling = Pooling::sum;
  } else if (pooling_name == "mean") {
    pooling = Pooling::mean;
  } else {
    throw InputError("weights pooling: unknown pooling '" + pooling_name + "'");
  }
  const auto& rj = field(j, "readout", "weights");
  const std::string rkind = as_string(field(rj, "kind", "readout"), "readout kind");
  Readout readout = LinearReadout{};
  if (rkind == "linear") {
    readout = LinearReadout{read_dense(rj, "readout", "")};
  } else if (rkind == "mlp2") {
    readout = read_mlp2(rj, "readout");
  } else {
    throw InputError("readout: unknown kind '" + rkind + "'");
  }
  return GnnModel(std::move(layers), pooling, std::move(readout));
}

inline std::string model_to_json(const GnnModel& model) {
  std::ostringstream out;
  out << "{\n  \"activation\": \"relu\",\n  \"layers\": [";
  for (std::size_t k = 0; k < model.layers().size(); ++k) {
    out << (k ? "," : "") << "\n    {";
    std::visit([&](const auto& l) {
      if constexpr (std::is_same_v<std::decay_t<decltype(l)>, GcnConv>) {
        out << "\n      \"kind\": \"gcn\",\n";
        detail::write_dense(out, l.dense, "      ", "");
      } else {
        out << "\n      \"kind\": \"gin\",\n      \"epsilon\": " << detail::number(l.epsilon)
            << ",\n      \"mlp\": {\n";
        detail::write_mlp2(out, l.mlp, "        ");
        out << "\n      }";
      }
    }, model.layers()[k]);
    out << "\n    }";
  }
  out << "\n  ],\n  \"pooling\": \"" << (model.pooling() == Pooling::sum ? "sum" : "mean")
      << "\",\n  \"readout\": {\n";
  std::visit([&](const auto& r) {
    if constexpr (std::is_same_v<std::decay_t<decltype(r)>, LinearReadout>) {
      out << "    \"kind\": \"linear\",\n";
      detail::write_dense(out, r.dense, "    ", "");
    } else {
      out << "    \"kind\": \"mlp2\",\n";
      detail::write_mlp2(out, r, "    ");
    }
  }, model.readout());
  out << "\n  }\n}\n";
  return out.str();
}

/// A baseline file is either a bare array or {"baseline": [...]}.
inline std::vector<double> parse_baseline(const std::string& text) {
  const auto j = detail::parse_json(text, "baseline file");
  if (j.is_object()) return detail::as_vector(detail::field(j, "baseline", "baseline file"), "baseline");
  return detail::as_vector(j, "baseline");
}

// ---------------------------------------------------------------- SI-Graph

struct SIGraphMetadata {
  std::string index;
  std::size_t order = 0;
  std::size_t ell = 0;
  std::optional<std::size_t> lambda;
  std::size_t call_count = 0;
  double nu_N = 0.0;
  double nu_empty = 0.0;
  double efficiency_residual = 0.0;
  std::size_t n = 0;
  bool exact = true;
  bool normalized = false;
  std::size_t target = 0;
  bool operator==(const SIGraphMetadata&) const = default;
};

struct SIGraphNode {
  std::size_t id = 0;
  double value = 0.0;
  bool operator==(const SIGraphNode&) const = default;
};

struct SIGraphHyperedge {
  std::vector<std::size_t> members;
  double value = 0.0;
  bool operator==(const SIGraphHyperedge&) const = default;
};

/// Hypergraph view of an explanation: order-1 values on the nodes, higher
/// orders on hyperedges. Values are pruned to exact zeros below
/// kPruneThreshold and zero hyperedges are dropped.
struct SIGraphExport {
  SIGraphMetadata metadata;
  std::vector<SIGraphNode> nodes;
  std::vector<SIGraphHyperedge> hyperedges;
  bool operator==(const SIGraphExport&) const = default;
};

inline SIGraphExport make_export(const InteractionValues& si, double nu_full, double nu_empty, std::size_t target,
                                 bool normalized) {
  SIGraphExport ex;
  auto& md = ex.metadata;
  md.index = std::string(to_string(si.kind));
  md.order = si.order;
  md.ell = si.ell;
  md.lambda = si.lambda;
  md.call_count = si.call_count;
  md.nu_N = nu_full;
  md.nu_empty = nu_empty;
  md.efficiency_residual = efficiency_check(si, nu_full, nu_empty);
  md.n = si.n_players;
  md.exact = !si.lambda.has_value();
  md.normalized = normalized;
  md.target = target;
  for (std::size_t i = 0; i < si.n_players; ++i) {
    ex.nodes.push_back({i, detail::pruned(si.at(Coalition::singleton(i)))});
  }
  for (const auto& [s, v] : si.sorted()) {
    if (s.size() < 2) continue;
    const double p = detail::pruned(v);
    if (p == 0.0) continue;
    ex.hyperedges.push_back({s.members(), p});
  }
  return ex;
}

inline std::string export_to_json(const SIGraphExport& ex) {
  using detail::number;
  const auto& md = ex.metadata;
  std::ostringstream out;
  out << "{\n  \"metadata\": {\n"
      << "    \"index\": \"" << md.index << "\",\n"
      << "    \"order\": " << md.order << ",\n"
      << "    \"ell\": " << md.ell << ",\n"
      << "    \"lambda\": " << (md.lambda ? std::to_string(*md.lambda) : "null") << ",\n"
      << "    \"call_count\": " << md.call_count << ",\n"
      << "    \"nu_N\": " << number(md.nu_N) << ",\n"
      << "    \"nu_empty\": " << number(md.nu_empty) << ",\n"
      << "    \"efficiency_residual\": " << number(md.efficiency_residual) << ",\n"
      << "    \"n\": " << md.n << ",\n"
      << "    \"exact\": " << (md.exact ? "true" : "false") << ",\n"
      << "    \"normalized\": " << (md.normalized ? "true" : "false") << ",\n"
      << "    \"target\": " << md.target << "\n  },\n  \"nodes\": [";
  for (std::size_t k = 0; k < ex.nodes.size(); ++k) {
    out << (k ? "," : "") << "\n    {\"id\": " << ex.nodes[k].id << ", \"value\": " << number(ex.nodes[k].value)
        << '}';
  }
  out << (ex.nodes.empty() ? "" : "\n  ") << "],\n  \"hyperedges\": [";
  for (std::size_t k = 0; k < ex.hyperedges.size(); ++k) {
    const auto& h = ex.hyperedges[k];
    out << (k ? "," : "") << "\n    {\"members\": [";
    for (std::size_t m = 0; m < h.members.size(); ++m) out << (m ? ", " : "") << h.members[m];
    out << "], \"value\": " << number(h.value) << '}';
  }
  out << (ex.hyperedges.empty() ? "" : "\n  ") << "]\n}\n";
  return out.str();
}

inline SIGraphExport export_from_json(const std::string& text) {
  using namespace detail;
  const auto j = parse_json(text, "SI-Graph file");
  SIGraphExport ex;
  const auto& m = field(j, "metadata", "SI-Graph");
  auto& md = ex.metadata;
  md.index = as_string(field(m, "index", "metadata"), "metadata index");
  md.order = as_index(field(m, "order", "metadata"), "metadata order");
  md.ell = as_index(field(m, "ell", "metadata"), "metadata ell");
  const auto& lam = field(m, "lambda", "metadata");
  if (!lam.is_null()) md.lambda = as_index(lam, "metadata lambda");
  md.call_count = as_index(field(m, "call_count", "metadata"), "metadata call_count");
  md.nu_N = as_number(field(m, "nu_N", "metadata"), "metadata nu_N");
  md.nu_empty = as_number(field(m, "nu_empty", "metadata"), "metadata nu_empty");
  md.efficiency_residual =
      as_number(field(m, "efficiency_residual", "metadata"), "metadata efficiency_residual");
  md.n = as_index(field(m, "n", "metadata"), "metadata n");
  const auto& exact = field(m, "exact", "metadata");
  const auto& normalized = field(m, "normalized", "metadata");
  if (!exact.is_boolean() || !normalized.is_boolean()) throw InputError("metadata: expected booleans");
  md.exact = exact.get<bool>();
  md.normalized = normalized.get<bool>();
  md.target = as_index(field(m, "target", "metadata"), "metadata target");
  const auto& nodes = field(j, "nodes", "SI-Graph");
  const auto& hyperedges = field(j, "hyperedges", "SI-Graph");
  if (!nodes.is_array() || !hyperedges.is_array()) throw InputError("SI-Graph: expected arrays");
  for (const auto& node : nodes) {
    ex.nodes.push_back({as_index(field(node, "id", "node"), "node id"),
                        as_number(field(node, "value", "node"), "node value")});
  }
  for (const auto& h : hyperedges) {
    SIGraphHyperedge edge;
    const auto& members = field(h, "members", "hyperedge");
    if (!members.is_array()) throw InputError("hyperedge members: expected an array");
    for (const auto& v : members) edge.members.push_back(as_index(v, "hyperedge member"));
    edge.value = as_number(field(h, "value", "hyperedge"), "hyperedge value");
    ex.hyperedges.push_back(std::move(edge));
  }
  return ex;
}

/// Graphviz rendering: nodes filled by sign (red positive, blue negative),
/// pairwise interactions as edges whose pen width scales with |value|,
/// higher orders as diamond nodes joined to their members.
inline std::string export_to_dot(const SIGraphExport& ex, const Graph* structure = nullptr) {
  auto color = [](double v) { return v > 0 ? "#d6604d" : (v < 0 ? "#4393c3" : "#f7f7f7"); };
  double scale = 0.0;
  for (const auto& h : ex.hyperedges) scale = std::max(scale, std::abs(h.value));
  auto width = [&](double v) { return scale > 0 ? 1.0 + 4.0 * std::abs(v) / scale : 1.0; };
  char buf[64];
  auto fmt = [&](const char* f, double v) {
    std::snprintf(buf, sizeof(buf), f, v);
    return std::string(buf);
  };

  std::ostringstream out;
  out << "graph SIGraph {\n  node [style=filled, fontname=\"Helvetica\"];\n";
  for (const auto& node : ex.nodes) {
    out << "  n" << node.id << " [label=\"" << node.id << "\\n" << fmt("%+.4g", node.value) << "\", fillcolor=\""
        << color(node.value) << "\"];\n";
  }
  if (structure) {
    for (const auto& e : structure->edges()) {
      out << "  n" << e.u << " -- n" << e.v << " [color=\"#bbbbbb\", style=dotted];\n";
    }
  }
  std::size_t aux = 0;
  for (const auto& h : ex.hyperedges) {
    if (h.members.size() == 2) {
      out << "  n" << h.members[0] << " -- n" << h.members[1] << " [penwidth=" << fmt("%.3f", width(h.value))
          << ", color=\"" << color(h.value) << "\", label=\"" << fmt("%+.4g", h.value) << "\"];\n";
      continue;
    }
    out << "  h" << aux << " [shape=diamond, label=\"" << fmt("%+.4g", h.value) << "\", fillcolor=\""
        << color(h.value) << "\"];\n";
    for (std::size_t m : h.members) {
      out << "  h" << aux << " -- n" << m << " [style=dashed, penwidth=" << fmt("%.3f", width(h.value))
          << "];\n";
    }
    ++aux;
  }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------- files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return buf.str();
}

/// Writes to a sibling temporary file and renames it over the target.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError("cannot write '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot rename onto '" + path + "': " + ec.message());
  }
}

}  // namespace graphsi

#endif  // GRAPHSI_IO_HPP
