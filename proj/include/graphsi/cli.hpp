#ifndef GRAPHSI_CLI_HPP
#define GRAPHSI_CLI_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <new>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "graphsi/baselines.hpp"
#include "graphsi/complexity.hpp"
#include "graphsi/errors.hpp"
#include "graphsi/game.hpp"
#include "graphsi/generate.hpp"
#include "graphsi/io.hpp"
#include "graphsi/moebius.hpp"

namespace graphsi {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,
  kExitInfeasible = 3,
  kExitNonlinearReadout = 4,
  kExitIo = 5,
};

/// Environment lookup; injectable so tests do not depend on the process env.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

namespace cli_detail {

inline constexpr const char* kFooter = R"(Settings precedence: command-line flags > GRAPHSI_* environment variables >
--config file. Every long option --foo-bar can be set as GRAPHSI_FOO_BAR or
as "foo-bar" in a flat JSON config object (arrays for list options).

Exit codes:
  0  success
  1  usage error (unknown flag, missing argument)
  2  invalid input (malformed JSON, invalid graph, dimension mismatch, bad parameter)
  3  infeasible (interaction budget exceeded, more than 64 nodes, budget too small)
  4  nonlinear readout (exact interactions need a linear readout)
  5  file I/O error)";

inline std::string env_name(const std::string& lname) {
  std::string name = "GRAPHSI_";
  for (char c : lname) name += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

inline std::vector<std::string> config_values(const nlohmann::json& v) {
  auto scalar = [](const nlohmann::json& x) -> std::string {
    if (x.is_string()) return x.get<std::string>();
    if (x.is_boolean()) return x.get<bool>() ? "true" : "false";
    if (x.is_number()) return x.dump();
    throw InputError("config: unsupported value " + x.dump());
  };
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(scalar(x));
  } else {
    out.push_back(scalar(v));
  }
  return out;
}

/// Fills options the command line left unset, first from the environment,
/// then from the config object.
inline void apply_fallbacks(CLI::App& app, const EnvLookup& env, const nlohmann::json& config) {
  for (CLI::Option* opt : app.get_options()) {
    if (opt->count() > 0 || opt->get_lnames().empty()) continue;
    const std::string& lname = opt->get_lnames().front();
    if (lname == "help" || lname == "config") continue;
    std::vector<std::string> values;
    if (auto v = env(env_name(lname))) {
      values.push_back(*v);
    } else if (config.is_object() && config.contains(lname)) {
      values = config_values(config.at(lname));
    } else {
      continue;
    }
    try {
      for (auto& v : values) opt->add_result(v);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw InputError("setting --" + lname + ": " + e.what());
    }
  }
}

inline Graph load_graph(const std::string& path) { return parse_graph(read_file(path)); }
inline GnnModel load_model(const std::string& path) { return parse_model(read_file(path)); }

inline std::vector<double> load_baseline(const std::string& spec, const Graph& g) {
  if (spec == "mean") return default_baseline(g);
  return parse_baseline(read_file(spec));
}

inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

inline std::size_t resolve_threads(std::size_t threads) { return threads == 0 ? default_thread_count() : threads; }

// ---------------------------------------------------------------- explain

struct ExplainArgs {
  std::string graph;
  std::string weights;
  std::size_t order = 2;
  std::string index = "ksii";
  std::string baseline = "mean";
  std::size_t lambda = 0;
  bool exact = false;
  bool normalize = false;
  std::string out;
  std::string format = "json";
  std::uint64_t ceiling = kDefaultBudgetCeiling;
};

inline void run_explain(const ExplainArgs& a, std::size_t threads, std::ostream& out) {
  if (a.format != "json" && a.format != "dot") throw InputError("unknown format '" + a.format + "'");
  const IndexKind kind = parse_index_kind(a.index);
  Graph g = load_graph(a.graph);
  GnnModel model = load_model(a.weights);
  model.check_input(g.feature_dim());
  if (!model.has_linear_readout()) {
    throw NonlinearReadout("explain needs a linear readout; this model has an mlp2 readout");
  }
  std::vector<double> baseline = load_baseline(a.baseline, g);
  const std::size_t n = g.num_nodes();
  if (n > kMaxPlayers) throw InfeasibleError("explain supports at most 64 nodes, graph has " + std::to_string(n));
  std::size_t order = a.order;
  if (kind == IndexKind::SV) order = 1;
  if (kind == IndexKind::MI) order = n;
  if (order < 1 || order > n) {
    throw InputError("order " + std::to_string(order) + " outside 1.." + std::to_string(n));
  }
  if (a.lambda > n) throw InputError("lambda " + std::to_string(a.lambda) + " exceeds n = " + std::to_string(n));

  const std::size_t ell = model.num_layers();
  const auto hoods = khop_neighborhoods(g, ell);
  GraphGame game(std::move(model), std::move(g), std::move(baseline), {a.normalize, 0, threads});
  const GraphShapIqResult result = a.lambda > 0 ? graphshapiq_approx(game, hoods, a.lambda, order, kind)
                                                : graphshapiq_exact(game, hoods, order, kind, a.ceiling);
  const SIGraphExport ex = make_export(result.si, result.nu_full, result.nu_empty, game.target(), a.normalize);
  emit(a.out, a.format == "json" ? export_to_json(ex) : export_to_dot(ex, &game.graph()), out);
}

// ---------------------------------------------------------------- complexity

struct ComplexityArgs {
  std::vector<std::string> paths;
  std::vector<std::size_t> ells{1, 2};
  std::string csv;
  std::size_t random_trees = 0;
  std::size_t min_n = 10;
  std::size_t max_n = 100;
  std::uint64_t seed = 0;
};

inline std::vector<NamedGraph> collect_graphs(const ComplexityArgs& a) {
  namespace fs = std::filesystem;
  std::vector<NamedGraph> graphs;
  for (const auto& path : a.paths) {
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(path, ec)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
      }
      if (ec) throw IoError("cannot list '" + path + "'");
      std::sort(files.begin(), files.end());
      for (const auto& f : files) graphs.push_back({f.stem().string(), load_graph(f.string())});
    } else {
      graphs.push_back({fs::path(path).stem().string(), load_graph(path)});
    }
  }
  if (a.random_trees > 0) {
    if (a.min_n < 1 || a.min_n > a.max_n) throw InputError("need 1 <= --min-n <= --max-n");
    for (std::size_t i = 0; i < a.random_trees; ++i) {
      auto rng = SplitMix64::stream(a.seed, 1000 + i);
      GraphSpec spec;
      spec.kind = GraphKind::tree;
      spec.n = a.min_n + static_cast<std::size_t>(rng.below(a.max_n - a.min_n + 1));
      spec.seed = rng.next();
      graphs.push_back({"tree_" + std::to_string(i), generate_graph(spec)});
    }
  }
  if (graphs.empty()) throw InputError("no graphs given");
  return graphs;
}

inline void run_complexity(const ComplexityArgs& a, std::size_t threads, std::ostream& out, std::ostream& err) {
  if (a.ells.empty()) throw InputError("--ell needs at least one value");
  for (std::size_t ell : a.ells) {
    if (ell == 0) throw InputError("--ell values must be at least 1");
  }
  const auto graphs = collect_graphs(a);
  const auto study = scaling_study(graphs, a.ells, threads);
  std::ostringstream csv;
  write_scaling_csv(csv, study);
  emit(a.csv, csv.str(), out);
  std::ostream& summary = a.csv.empty() ? err : out;
  for (const auto& fit : study.fits) {
    summary << "ell=" << fit.ell << " samples=" << fit.log_curve.samples;
    if (fit.log_curve.degenerate) {
      summary << " fit=degenerate\n";
      continue;
    }
    summary << " log10(calls)~ln(n): slope=" << detail::number(fit.log_curve.slope)
            << " r2=" << detail::number(fit.log_curve.r2);
    if (!fit.linear.degenerate) summary << " log10(calls)~n: r2=" << detail::number(fit.linear.r2);
    summary << '\n';
  }
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkArgs {
  std::string graph;
  std::string weights;
  std::size_t order = 2;
  std::vector<std::size_t> budgets;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::string baseline = "mean";
  std::string out;
};

inline double mse_vs(const InteractionValues& truth, const InteractionValues& estimate, std::size_t order) {
  double total = 0.0;
  std::size_t count = 0;
  for_each_subset_up_to(Coalition::full(truth.n_players), order, [&](Coalition s) {
    if (s.empty()) return;
    const double d = estimate.at(s) - truth.at(s);
    total += d * d;
    ++count;
  });
  return count ? total / static_cast<double>(count) : 0.0;
}

inline void run_benchmark(const BenchmarkArgs& a, std::size_t threads, std::ostream& out) {
  Graph g = load_graph(a.graph);
  GnnModel model = load_model(a.weights);
  model.check_input(g.feature_dim());
  if (!model.has_linear_readout()) throw NonlinearReadout("benchmark ground truth needs a linear readout");
  const std::vector<double> baseline = load_baseline(a.baseline, g);
  const std::size_t n = g.num_nodes();
  if (n > kMaxPlayers) throw InfeasibleError("benchmark supports at most 64 nodes");
  if (a.order < 1 || a.order > n) throw InputError("order outside 1.." + std::to_string(n));
  const IndexKind kind = a.order == 1 ? IndexKind::SV : IndexKind::SII;
  const std::size_t ell = model.num_layers();
  const auto hoods = khop_neighborhoods(g, ell);
  const GameOptions options{false, 0, threads};

  auto fresh_game = [&] { return std::make_unique<GraphGame>(model, g, baseline, options); };
  auto truth_game = fresh_game();
  const GraphShapIqResult truth = graphshapiq_exact(*truth_game, hoods, a.order, kind);
  const InteractionSet interactions = build_interaction_set(hoods);

  std::ostringstream csv;
  csv << "method,budget,seed,mse_vs_exact,calls\n";
  for (std::size_t lambda = 1; lambda <= hoods.max_size(); ++lambda) {
    auto game = fresh_game();
    const auto approx = graphshapiq_approx(*game, hoods, lambda, a.order, kind);
    csv << "graphshapiq_l" << lambda << ',' << game->call_count() << ",-,"
        << detail::number(mse_vs(truth.si, approx.si, a.order)) << ',' << game->call_count() << '\n';
  }
  std::vector<std::size_t> budgets = a.budgets;
  if (budgets.empty()) budgets.push_back(interactions.size());
  for (std::size_t budget : budgets) {
    for (std::uint64_t seed : a.seeds) {
      for (bool informed : {true, false}) {
        csv << (informed ? "permutation_informed," : "permutation_uninformed,") << budget << ',' << seed << ',';
        auto game = fresh_game();
        SamplingOptions so;
        so.budget = budget;
        so.seed = seed;
        so.informed = informed ? &interactions : nullptr;
        try {
          const auto est = permutation_sampling_sii(*game, a.order, so);
          csv << detail::number(mse_vs(truth.si, est.values, a.order)) << ',' << est.calls << '\n';
        } catch (const InfeasibleError&) {
          csv << "infeasible,0\n";
        }
      }
    }
  }
  emit(a.out, csv.str(), out);
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string kind = "path";
  std::size_t n = 4;
  std::size_t d0 = 2;
  std::uint64_t seed = 0;
  double p = 0.2;
  std::string model = "gin";
  std::size_t layers = 1;
  std::size_t hidden = 8;
  std::size_t out_dim = 2;
  std::string pooling = "sum";
  std::string readout = "linear";
  std::string graph_out;
  std::string weights_out;
};

inline void run_generate(const GenerateArgs& a, std::ostream& out) {
  GraphSpec gs;
  gs.kind = parse_graph_kind(a.kind);
  gs.n = a.n;
  gs.d0 = a.d0;
  gs.seed = a.seed;
  gs.p = a.p;
  if ((gs.kind == GraphKind::er || gs.kind == GraphKind::tree) && gs.n > kMaxPlayers) {
    throw InputError("--kind " + a.kind + " supports at most 64 nodes");
  }
  if (gs.n > 100000) throw InputError("--n is too large");
  ModelSpec ms;
  ms.conv = parse_conv_kind(a.model);
  ms.layers = a.layers;
  ms.hidden = a.hidden;
  ms.d0 = a.d0;
  ms.d_out = a.out_dim;
  ms.seed = a.seed;
  if (a.pooling == "sum") {
    ms.pooling = Pooling::sum;
  } else if (a.pooling == "mean") {
    ms.pooling = Pooling::mean;
  } else {
    throw InputError("unknown pooling '" + a.pooling + "'");
  }
  if (a.readout != "linear" && a.readout != "mlp2") throw InputError("unknown readout '" + a.readout + "'");
  ms.mlp2_readout = a.readout == "mlp2";
  if (a.layers > 16 || a.hidden > 4096 || a.d0 > 4096 || a.out_dim > 4096) {
    throw InputError("model dimensions are too large");
  }

  const Graph g = generate_graph(gs);
  const GnnModel model = generate_model(ms);
  GraphMeta meta{a.kind, a.seed, gs.kind == GraphKind::er ? std::optional<double>(a.p) : std::nullopt};
  write_file_atomic(a.graph_out, graph_to_json(g, meta));
  write_file_atomic(a.weights_out, model_to_json(model));
  out << "wrote " << a.graph_out << " (n=" << g.num_nodes() << ", edges=" << g.num_edges() << ") and "
      << a.weights_out << '\n';
}

// ---------------------------------------------------------------- audit

struct AuditArgs {
  std::string graph;
  std::string linear;
  std::string mlp2;
  std::string baseline = "mean";
};

inline void run_audit(const AuditArgs& a, std::ostream& out) {
  const Graph g = load_graph(a.graph);
  const GnnModel linear = load_model(a.linear);
  const GnnModel mlp2 = load_model(a.mlp2);
  linear.check_input(g.feature_dim());
  mlp2.check_input(g.feature_dim());
  if (!linear.has_linear_readout()) throw InputError("first weights file must have a linear readout");
  if (mlp2.has_linear_readout()) throw InputError("second weights file must have an mlp2 readout");
  if (linear.num_layers() != mlp2.num_layers()) throw InputError("models must have the same number of layers");
  const auto report = audit_nonlinear_readout(linear, mlp2, g, load_baseline(a.baseline, g));
  out << "n=" << report.n << " ell=" << report.ell << " interaction_set_size=" << report.interaction_set_size
      << '\n'
      << "linear_off_mass=" << detail::number(report.linear_off_mass) << " at " << to_string(report.linear_argmax)
      << '\n'
      << "mlp2_off_mass=" << detail::number(report.mlp2_off_mass) << " at " << to_string(report.mlp2_argmax)
      << '\n';
}

}  // namespace cli_detail

/// Runs the graphsi command line. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                   const EnvLookup& env = process_env) {
  using namespace cli_detail;
  CLI::App app("Exact and approximate Shapley interactions for graph neural networks", "graphsi");
  app.footer(kFooter);
  app.require_subcommand(1);
  std::size_t threads = 0;
  std::string config_path;
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  app.add_option("--config", config_path, "JSON config file with fallback settings");

  ExplainArgs ex;
  auto* explain = app.add_subcommand("explain", "Shapley interactions of a graph prediction, as an SI-Graph");
  explain->add_option("graph", ex.graph, "Graph JSON file")->required();
  explain->add_option("weights", ex.weights, "Model weights JSON file")->required();
  explain->add_option("--order", ex.order, "Explanation order k")->capture_default_str();
  explain->add_option("--index", ex.index, "sv|sii|ksii|stii|mi")->capture_default_str();
  explain->add_option("--baseline", ex.baseline, "'mean' or a baseline JSON file")->capture_default_str();
  auto* lambda_opt = explain->add_option("--lambda", ex.lambda, "Approximate with MIs up to this size");
  auto* exact_opt = explain->add_flag("--exact", ex.exact, "Exact computation (default)");
  lambda_opt->excludes(exact_opt);
  explain->add_flag("--normalize", ex.normalize, "Report v(T) - v(empty)");
  explain->add_option("--out", ex.out, "Output file (default stdout)");
  explain->add_option("--format", ex.format, "json|dot")->capture_default_str();
  explain->add_option("--ceiling", ex.ceiling, "Largest interaction set evaluated exactly")->capture_default_str();

  ComplexityArgs cx;
  auto* complexity = app.add_subcommand("complexity", "Model-call counts and scaling fits");
  complexity->add_option("paths", cx.paths, "Graph JSON files or directories");
  complexity->add_option("--ell", cx.ells, "Comma-separated hop counts")->delimiter(',')->capture_default_str();
  complexity->add_option("--csv", cx.csv, "CSV output file (default stdout)");
  complexity->add_option("--random-trees", cx.random_trees, "Add this many random trees (max degree 3)");
  complexity->add_option("--min-n", cx.min_n, "Smallest random tree")->capture_default_str();
  complexity->add_option("--max-n", cx.max_n, "Largest random tree")->capture_default_str();
  complexity->add_option("--seed", cx.seed, "Seed for random trees")->capture_default_str();

  BenchmarkArgs bx;
  auto* benchmark = app.add_subcommand("benchmark", "Approximation error against exact ground truth");
  benchmark->add_option("graph", bx.graph, "Graph JSON file")->required();
  benchmark->add_option("weights", bx.weights, "Model weights JSON file")->required();
  benchmark->add_option("--order", bx.order, "Explanation order k")->capture_default_str();
  benchmark->add_option("--budgets", bx.budgets, "Comma-separated sampling budgets (default |I|)")->delimiter(',');
  benchmark->add_option("--seeds", bx.seeds, "Comma-separated seeds")->delimiter(',')->capture_default_str();
  benchmark->add_option("--baseline", bx.baseline, "'mean' or a baseline JSON file")->capture_default_str();
  benchmark->add_option("--out", bx.out, "CSV output file (default stdout)");

  GenerateArgs gx;
  auto* generate = app.add_subcommand("generate", "Seeded synthetic graph and model");
  generate->add_option("--kind", gx.kind, "path|cycle|tree|er")->capture_default_str();
  generate->add_option("--n", gx.n, "Number of nodes")->capture_default_str();
  generate->add_option("--d0", gx.d0, "Feature width")->capture_default_str();
  generate->add_option("--seed", gx.seed, "Seed")->capture_default_str();
  generate->add_option("--p", gx.p, "Edge probability for er")->capture_default_str();
  generate->add_option("--model", gx.model, "gcn|gin")->capture_default_str();
  generate->add_option("--layers", gx.layers, "Conv layers")->capture_default_str();
  generate->add_option("--hidden", gx.hidden, "Hidden width")->capture_default_str();
  generate->add_option("--out-dim", gx.out_dim, "Output width")->capture_default_str();
  generate->add_option("--pooling", gx.pooling, "sum|mean")->capture_default_str();
  generate->add_option("--readout", gx.readout, "linear|mlp2")->capture_default_str();
  generate->add_option("--graph-out", gx.graph_out, "Graph output file")->required();
  generate->add_option("--weights-out", gx.weights_out, "Weights output file")->required();

  AuditArgs ax;
  auto* audit = app.add_subcommand("audit-readout", "Off-receptive-field Möbius mass, linear vs mlp2 readout");
  audit->add_option("graph", ax.graph, "Graph JSON file")->required();
  audit->add_option("linear", ax.linear, "Weights with a linear readout")->required();
  audit->add_option("mlp2", ax.mlp2, "Weights with an mlp2 readout")->required();
  audit->add_option("--baseline", ax.baseline, "'mean' or a baseline JSON file")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    nlohmann::json config;
    if (!config_path.empty()) {
      config = detail::parse_json(read_file(config_path), "config file");
      if (!config.is_object()) throw InputError("config file must hold a JSON object");
    }
    apply_fallbacks(app, env, config);
    for (CLI::App* sub : app.get_subcommands()) apply_fallbacks(*sub, env, config);
    const std::size_t workers = resolve_threads(threads);

    if (explain->parsed()) {
      run_explain(ex, workers, out);
    } else if (complexity->parsed()) {
      run_complexity(cx, workers, out, err);
    } else if (benchmark->parsed()) {
      run_benchmark(bx, workers, out);
    } else if (generate->parsed()) {
      run_generate(gx, out);
    } else if (audit->parsed()) {
      run_audit(ax, out);
    }
    return kExitOk;
  } catch (const NonlinearReadout& e) {
    err << "error: " << e.what() << '\n';
    return kExitNonlinearReadout;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace graphsi

#endif  // GRAPHSI_CLI_HPP
