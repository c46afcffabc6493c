// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "graphsi/cli.hpp"
#include "support.hpp"

using namespace graphsi;
using namespace testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %-28s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

constexpr int kOracleCases = 50;

GraphGame game_for(const Instance& inst) { return GraphGame(inst.model, inst.graph, default_baseline(inst.graph)); }

Outcome oracle_equivalence() {
  double worst_on = 0.0, worst_off = 0.0;
  for (int c = 0; c < kOracleCases; ++c) {
    const Instance inst = random_instance(c);
    const auto hoods = khop_neighborhoods(inst.graph, inst.model.num_layers());
    GraphGame game = game_for(inst);
    const auto exact = graphshapiq_exact(game, hoods, 1, IndexKind::SV);
    GraphGame oracle_game = game_for(inst);
    const auto oracle = brute_force_mi(oracle_game);
    const auto set = build_interaction_set(hoods);
    for (const auto& [s, m] : oracle.sorted()) {
      if (set.contains(s)) {
        worst_on = std::max(worst_on, std::abs(exact.mi.at(s) - m));
      } else {
        worst_off = std::max(worst_off, std::abs(m));
      }
    }
  }
  return {worst_on < 1e-8 && worst_off < 1e-8, std::to_string(kOracleCases) + " cases, max |diff| on I " +
                                                    fmt(worst_on) + ", max |MI| off I " + fmt(worst_off)};
}

Outcome call_counts() {
  int mismatches = 0, chain_checked = 0, chain_broken = 0;
  for (int c = 0; c < kOracleCases; ++c) {
    const Instance inst = random_instance(c);
    const std::size_t ell = inst.model.num_layers();
    const auto hoods = khop_neighborhoods(inst.graph, ell);
    GraphGame game = game_for(inst);
    graphshapiq_exact(game, hoods, 1, IndexKind::SV);
    const auto in = interaction_membership(inst.graph, ell);
    const auto size = static_cast<std::size_t>(std::count(in.begin(), in.end(), 1));
    if (game.call_count() != size) ++mismatches;
    const auto est = estimate_calls(inst.graph, ell);
    if (est.stats.d_max >= 2) {
      ++chain_checked;
      const bool ok = est.exact && *est.exact == size && SaturatingCount(size) <= est.bounds.sum_bound &&
                      est.bounds.sum_bound <= est.bounds.nmax_bound && est.bounds.dmax_bound &&
                      est.bounds.nmax_bound <= *est.bounds.dmax_bound;
      if (!ok) ++chain_broken;
    }
  }
  return {mismatches == 0 && chain_broken == 0,
          "call_count != |I| in " + std::to_string(mismatches) + " cases; bound chain broken in " +
              std::to_string(chain_broken) + "/" + std::to_string(chain_checked)};
}

Outcome canonical_instance() {
  const Graph g = parse_graph(read_file(data_path("demo4_graph.json")));
  const auto set = build_interaction_set(khop_neighborhoods(g, 1));
  std::set<std::uint64_t> excluded;
  for (std::uint64_t t = 0; t < 16; ++t) {
    if (!set.contains(Coalition(t))) excluded.insert(t);
  }
  const std::set<std::uint64_t> expected{Coalition{0, 3}.bits(), Coalition{0, 1, 3}.bits(),
                                         Coalition{0, 2, 3}.bits(), Coalition{0, 1, 2, 3}.bits()};
  std::string listed;
  for (auto t : excluded) listed += to_string(Coalition(t));
  return {set.size() == 12 && excluded == expected, "|I| = " + std::to_string(set.size()) + ", excluded " + listed};
}

Outcome node_game_invariance() {
  double worst = 0.0;
  for (std::uint64_t c = 0; c < 200; ++c) {
    auto rng = SplitMix64::stream(404, c);
    const std::size_t n = 2 + rng.below(11);
    const std::size_t d0 = 1 + rng.below(3);
    const std::size_t ell = 1 + rng.below(3);
    const Graph g = random_graph(static_cast<int>(c % 3), n, d0, rng.next());
    const GnnModel model = random_model(rng.bernoulli(0.5), ell, d0, rng.next());
    const auto hoods = khop_neighborhoods(g, ell);
    const std::size_t i = rng.below(n);
    const Coalition t(rng.below(std::uint64_t{1} << n));
    const NodeGame game(model, g, default_baseline(g), i);
    const auto a = game.evaluate(t);
    const auto b = game.evaluate(t & hoods.hoods[i]);
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  }
  return {worst < 1e-9, "200 tuples, max |v_i(T) - v_i(T ∩ N_i)| " + fmt(worst)};
}

Outcome conversion_identities() {
  double worst = 0.0;
  for (std::uint64_t c = 0; c < 30; ++c) {
    const std::size_t n = 2 + c % 9;
    const auto table = random_table(n, 500 + c);
    auto game = table_game(table, n);
    const auto mi = brute_force_mi(game);
    const auto sv = mi_to_sv(mi);
    const auto k1 = mi_to_ksii(mi, 1);
    const auto kn = mi_to_ksii(mi, n);
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(k1.at(Coalition::singleton(i)) - sv.at(Coalition::singleton(i))));
    }
    for (const auto& [s, m] : mi.sorted()) {
      if (!s.empty()) worst = std::max(worst, std::abs(kn.at(s) - m));
    }
    for (std::size_t k = 1; k <= std::min<std::size_t>(n, 4); ++k) {
      const auto sii = mi_to_sii(mi, k);
      const auto ksii = mi_to_ksii(mi, k);
      const auto stii = mi_to_stii(mi, k);
      for_each_subset_up_to(Coalition::full(n), k, [&](Coalition s) {
        if (s.size() == k) worst = std::max(worst, std::abs(ksii.at(s) - sii.at(s)));
        if (!s.empty() && s.size() < k) worst = std::max(worst, std::abs(stii.at(s) - mi.at(s)));
      });
    }
  }
  return {worst < 1e-10, "30 games, max deviation " + fmt(worst)};
}

Outcome efficiency() {
  double worst_exact = 0.0, worst_approx = 0.0;
  std::size_t approx_runs = 0;
  for (int c = 0; c < kOracleCases; ++c) {
    const Instance inst = random_instance(c);
    const auto hoods = khop_neighborhoods(inst.graph, inst.model.num_layers());
    const std::size_t k = std::min<std::size_t>(2, inst.graph.num_nodes());
    GraphGame game = game_for(inst);
    const auto exact = graphshapiq_exact(game, hoods, k, IndexKind::kSII);
    worst_exact = std::max(worst_exact, std::abs(exact.si.sum_nonempty() + exact.nu_empty - exact.nu_full));
    for (std::size_t lambda = 1; lambda <= hoods.max_size(); ++lambda) {
      GraphGame g2 = game_for(inst);
      const auto approx = graphshapiq_approx(g2, hoods, lambda, k, IndexKind::kSII);
      worst_approx =
          std::max(worst_approx, std::abs(approx.si.sum_nonempty() + approx.nu_empty - approx.nu_full));
      ++approx_runs;
    }
  }
  return {worst_exact < 1e-8 && worst_approx < 1e-8,
          "exact residual " + fmt(worst_exact) + ", approx residual " + fmt(worst_approx) + " over " +
              std::to_string(approx_runs) + " lambda runs"};
}

Outcome near_full_lambda() {
  double worst = 0.0;
  for (int c = 0; c < kOracleCases; ++c) {
    const Instance inst = random_instance(c);
    const auto hoods = khop_neighborhoods(inst.graph, inst.model.num_layers());
    const std::size_t lambda = std::max<std::size_t>(1, hoods.max_size() - 1);
    const std::size_t k = std::min<std::size_t>(2, inst.graph.num_nodes());
    GraphGame a = game_for(inst);
    GraphGame b = game_for(inst);
    const auto exact = graphshapiq_exact(a, hoods, k, IndexKind::kSII);
    const auto approx = graphshapiq_approx(b, hoods, lambda, k, IndexKind::kSII);
    for (const auto& [s, m] : exact.mi.sorted()) worst = std::max(worst, std::abs(approx.mi.at(s) - m));
    for (const auto& [s, v] : approx.mi.sorted()) worst = std::max(worst, std::abs(exact.mi.at(s) - v));
    for (const auto& [s, v] : exact.si.sorted()) worst = std::max(worst, std::abs(approx.si.at(s) - v));
  }
  return {worst < 1e-9, "lambda = n_max - 1 on 50 cases, max |diff| " + fmt(worst)};
}

Outcome constant_and_linear() {
  double worst_const = 0.0, worst_linear = 0.0;
  for (std::uint64_t c = 0; c < 10; ++c) {
    const std::size_t n = 3 + c % 8;
    const double value = 0.5 * static_cast<double>(c) - 2.0;
    FunctionGame constant(n, [value](Coalition) { return value; });
    const auto mi = brute_force_mi(constant);
    for (const auto& [s, m] : mi.sorted()) worst_const = std::max(worst_const, std::abs(s.empty() ? m - value : m));

    const auto t1 = random_table(n, 900 + c);
    const auto t2 = random_table(n, 950 + c);
    const double scale = 3.0 - 0.7 * static_cast<double>(c);
    std::vector<double> mix(t1.size());
    for (std::size_t k = 0; k < mix.size(); ++k) mix[k] = scale * t1[k] + t2[k];
    auto g1 = table_game(t1, n);
    auto g2 = table_game(t2, n);
    auto gm = table_game(mix, n);
    const auto m1 = brute_force_mi(g1), m2 = brute_force_mi(g2), mm = brute_force_mi(gm);
    for (const auto& [s, m] : mm.sorted()) {
      worst_linear = std::max(worst_linear, std::abs(m - (scale * m1.at(s) + m2.at(s))));
    }
  }
  return {worst_const < 1e-10 && worst_linear < 1e-10,
          "constant-game off-empty mass " + fmt(worst_const) + ", linearity deviation " + fmt(worst_linear)};
}

Outcome scaling() {
  std::vector<NamedGraph> graphs;
  for (std::uint64_t i = 0; i < 200; ++i) {
    auto rng = SplitMix64::stream(2024, i);
    GraphSpec spec;
    spec.kind = GraphKind::tree;
    spec.n = 10 + rng.below(91);
    spec.seed = rng.next();
    graphs.push_back({"tree_" + std::to_string(i), generate_graph(spec)});
  }
  const std::vector<std::size_t> ells{1, 2};
  const auto study = scaling_study(graphs, ells, default_thread_count());
  bool pass = true;
  std::string detail;
  for (const auto& fit : study.fits) {
    pass = pass && !fit.log_curve.degenerate && fit.log_curve.r2 > 0.9;
    detail += "ell=" + std::to_string(fit.ell) + " R2 " + fmt(fit.log_curve.r2) + " (vs n: " +
              fmt(fit.linear.r2) + "); ";
    std::vector<std::pair<std::size_t, double>> points;
    for (const auto& row : study.rows) {
      if (row.ell == fit.ell && row.n >= 40) points.emplace_back(row.n, row.estimate.speedup_log10());
    }
    std::size_t violations = 0;
    for (const auto& a : points) {
      for (const auto& b : points) {
        if (a.first < b.first && !(a.second < b.second)) ++violations;
      }
    }
    pass = pass && violations == 0;
    detail += std::to_string(violations) + " speed-up order violations; ";
  }
  return {pass, detail};
}

Outcome informed_sampling() {
  const Graph g = parse_graph(read_file(data_path("demo8_graph.json")));
  const GnnModel model = parse_model(read_file(data_path("demo8_weights.json")));
  const auto hoods = khop_neighborhoods(g, model.num_layers());
  const auto set = build_interaction_set(hoods);
  GraphGame truth_game(model, g, default_baseline(g));
  const auto truth = graphshapiq_exact(truth_game, hoods, 2, IndexKind::SII);
  auto mse = [&](const InteractionValues& est) {
    double total = 0.0;
    std::size_t count = 0;
    for_each_subset_up_to(Coalition::full(g.num_nodes()), 2, [&](Coalition s) {
      if (s.empty()) return;
      total += std::pow(est.at(s) - truth.si.at(s), 2);
      ++count;
    });
    return total / static_cast<double>(count);
  };
  std::vector<double> informed, uninformed;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (bool use : {true, false}) {
      GraphGame game(model, g, default_baseline(g));
      SamplingOptions options;
      options.budget = set.size();
      options.seed = seed;
      options.informed = use ? &set : nullptr;
      (use ? informed : uninformed).push_back(mse(permutation_sampling_sii(game, 2, options).values));
    }
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
  };
  const double mi = median(informed), mu = median(uninformed);
  return {mi <= mu, "budget |I| = " + std::to_string(set.size()) + ", median MSE informed " + fmt(mi) +
                        " vs uninformed " + fmt(mu)};
}

Outcome readout_audit() {
  const Graph g = parse_graph(read_file(data_path("demo4_graph.json")));
  const auto report = audit_nonlinear_readout(parse_model(read_file(data_path("demo4_weights.json"))),
                                              parse_model(read_file(data_path("demo4_weights_mlp2.json"))), g);
  return {report.linear_off_mass < 1e-8 && report.mlp2_off_mass > 1e-4,
          "off-I mass linear " + fmt(report.linear_off_mass) + " at " + to_string(report.linear_argmax) +
              ", mlp2 " + fmt(report.mlp2_off_mass) + " at " + to_string(report.mlp2_argmax)};
}

std::string mutate(std::string s, SplitMix64& rng) {
  static const std::vector<std::string> tokens{"[", "]", "{", "}", ",", ":", "\"", "-", "1e999", "null", "true",
                                               "0", "-1", "99999999999999999999", "\"gin\"", "\"mlp2\"", "NaN",
                                               "1.5", "[]", "{}"};
  const std::size_t edits = 1 + rng.below(4);
  for (std::size_t e = 0; e < edits && !s.empty(); ++e) {
    const std::size_t pos = rng.below(s.size());
    switch (rng.below(6)) {
      case 0: s[pos] = static_cast<char>(rng.below(256)); break;
      case 1: s.erase(pos, 1 + rng.below(8)); break;
      case 2: s.insert(pos, tokens[rng.below(tokens.size())]); break;
      case 3: s.resize(pos); break;
      case 4: {
        const std::size_t len = std::min<std::size_t>(1 + rng.below(40), s.size() - pos);
        s.insert(rng.below(s.size()), s.substr(pos, len));
        break;
      }
      default: {
        // replace a number-ish character with a digit
        if (std::isdigit(static_cast<unsigned char>(s[pos]))) s[pos] = static_cast<char>('0' + rng.below(10));
        else s[pos] = "0123456789,[]"[rng.below(13)];
      }
    }
  }
  return s;
}

Outcome cli_robustness() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("graphsi_fuzz_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string graph = read_file(data_path("demo4_graph.json"));
  const std::string weights = read_file(data_path("demo4_weights.json"));
  const std::string mlp2 = read_file(data_path("demo4_weights_mlp2.json"));
  const std::string good_graph = data_path("demo4_graph.json");
  const std::string good_weights = data_path("demo4_weights.json");
  const std::set<int> documented{kExitOk, kExitUsage, kExitInput, kExitInfeasible, kExitNonlinearReadout, kExitIo};
  auto no_env = [](const std::string&) -> std::optional<std::string> { return std::nullopt; };

  std::map<int, int> histogram;
  int undocumented = 0;
  const int kCases = 10000;
  for (int c = 0; c < kCases; ++c) {
    auto rng = SplitMix64::stream(77, static_cast<std::uint64_t>(c));
    const fs::path file = dir / "mutant.json";
    std::vector<std::string> args;
    switch (c % 5) {
      case 0:
      case 1:
        write_file_atomic(file.string(), mutate(graph, rng));
        args = {"--threads", "1", "explain", file.string(), good_weights, "--order", "2"};
        break;
      case 2:
        write_file_atomic(file.string(), mutate(weights, rng));
        args = {"--threads", "1", "explain", good_graph, file.string(), "--lambda", "2"};
        break;
      case 3:
        write_file_atomic(file.string(), mutate(mlp2, rng));
        args = {"audit-readout", good_graph, good_weights, file.string()};
        break;
      default:
        write_file_atomic(file.string(), mutate(weights, rng));
        args = {"--threads", "1", "benchmark", good_graph, file.string(), "--seeds", "0", "--budgets", "12"};
        break;
    }
    std::ostringstream out, err;
    const int code = run_cli(args, out, err, no_env);
    ++histogram[code];
    if (!documented.contains(code)) ++undocumented;
  }

  // byte-identical fixture output across runs and worker counts
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "1", "4", "4"}) {
    std::ostringstream out, err;
    run_cli({"--threads", threads, "explain", good_graph, good_weights, "--exact", "--index", "mi"}, out, err,
            no_env);
    outputs.push_back(out.str());
  }
  std::vector<std::string> outputs8;
  for (const char* threads : {"1", "3"}) {
    std::ostringstream out, err;
    run_cli({"--threads", threads, "explain", data_path("demo8_graph.json"), data_path("demo8_weights.json"),
             "--order", "3"},
            out, err, no_env);
    outputs8.push_back(out.str());
  }
  fs::remove_all(dir);
  const bool identical = !outputs[0].empty() && std::all_of(outputs.begin(), outputs.end(), [&](const auto& o) {
    return o == outputs[0];
  }) && outputs8[0] == outputs8[1] && !outputs8[0].empty();

  std::string detail = std::to_string(kCases) + " mutants, exit codes {";
  for (const auto& [code, count] : histogram) detail += std::to_string(code) + ":" + std::to_string(count) + " ";
  detail += "}, undocumented " + std::to_string(undocumented) + ", outputs " +
            (identical ? "byte-identical" : "DIFFER") + " across runs/threads";
  return {undocumented == 0 && identical, detail};
}

}  // namespace

int main() {
  report(1, "oracle-equivalence", oracle_equivalence);
  report(2, "call-count-exactness", call_counts);
  report(3, "canonical-instance", canonical_instance);
  report(4, "node-game-invariance", node_game_invariance);
  report(5, "conversion-identities", conversion_identities);
  report(6, "efficiency", efficiency);
  report(7, "lambda-n_max-minus-one", near_full_lambda);
  report(8, "constant-and-linearity", constant_and_linear);
  report(9, "scaling-reproduction", scaling);
  report(10, "interaction-informed", informed_sampling);
  report(11, "deep-readout-audit", readout_audit);
  report(12, "cli-robustness", cli_robustness);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
