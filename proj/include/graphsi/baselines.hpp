#ifndef GRAPHSI_BASELINES_HPP
#define GRAPHSI_BASELINES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "graphsi/coalition.hpp"
#include "graphsi/errors.hpp"
#include "graphsi/game.hpp"
#include "graphsi/gnn.hpp"
#include "graphsi/graph.hpp"
#include "graphsi/interaction_values.hpp"
#include "graphsi/moebius.hpp"
#include "graphsi/random.hpp"

namespace graphsi {

inline constexpr std::size_t kBruteForceMiMaxPlayers = 16;
inline constexpr std::size_t kBruteForceIndexMaxPlayers = 14;

/// Game values on all 2^n coalitions, indexed by mask.
template <Game G>
std::vector<double> exhaustive_values(G& game, std::size_t max_players = kBruteForceMiMaxPlayers) {
  const std::size_t n = game.num_players();
  if (n > max_players) {
    throw InfeasibleError("exhaustive evaluation supports at most " + std::to_string(max_players) +
                          " players, got " + std::to_string(n));
  }
  std::vector<Coalition> all(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < all.size(); ++mask) all[mask] = Coalition(mask);
  return evaluate_all(game, all);
}

/// Delta_S(T) = sum_{L ⊆ S} (-1)^{|S|-|L|} v(T ∪ L) over a mask-indexed table.
inline double discrete_derivative(std::span<const double> table, Coalition s, Coalition t) {
  double total = 0.0;
  for_each_subset(s, [&](Coalition l) {
    const double v = table[(t | l).bits()];
    total += ((s.size() - l.size()) % 2 == 0) ? v : -v;
  });
  return total;
}

namespace detail {

inline double binom(std::size_t n, std::size_t k) { return binomial(n, k); }

inline InteractionValues make_values(IndexKind kind, std::size_t order, std::size_t n) {
  InteractionValues out;
  out.kind = kind;
  out.order = order;
  out.n_players = n;
  return out;
}

}  // namespace detail

/// Möbius interactions of every coalition, by direct inclusion-exclusion.
template <Game G>
InteractionValues brute_force_mi(G& game) {
  const auto table = exhaustive_values(game, kBruteForceMiMaxPlayers);
  const std::size_t n = game.num_players();
  auto out = detail::make_values(IndexKind::MI, n, n);
  out.values.reserve(table.size());
  for (std::size_t mask = 0; mask < table.size(); ++mask) {
    const Coalition s(mask);
    double total = 0.0;
    for_each_subset(s, [&](Coalition t) {
      total += ((s.size() - t.size()) % 2 == 0) ? table[t.bits()] : -table[t.bits()];
    });
    out.values.emplace(s, total);
  }
  out.call_count = table.size();
  return out;
}

/// Shapley values as the weighted average of marginal contributions.
template <Game G>
InteractionValues brute_force_sv(G& game) {
  const auto table = exhaustive_values(game, kBruteForceIndexMaxPlayers);
  const std::size_t n = game.num_players();
  auto out = detail::make_values(IndexKind::SV, 1, n);
  const Coalition all = Coalition::full(n);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for_each_subset(all.without(i), [&](Coalition t) {
      const double weight = 1.0 / (static_cast<double>(n) * detail::binom(n - 1, t.size()));
      total += weight * (table[t.with(i).bits()] - table[t.bits()]);
    });
    out.values.emplace(Coalition::singleton(i), total);
  }
  return out;
}

/// Shapley interaction index of every set of size 1..order, by averaging
/// discrete derivatives over all complements.
template <Game G>
InteractionValues brute_force_sii(G& game, std::size_t order) {
  const auto table = exhaustive_values(game, kBruteForceIndexMaxPlayers);
  const std::size_t n = game.num_players();
  if (order < 1 || order > n) throw std::invalid_argument("order outside 1..n");
  auto out = detail::make_values(IndexKind::SII, order, n);
  const Coalition all = Coalition::full(n);
  for_each_subset_up_to(all, order, [&](Coalition s) {
    if (s.empty()) return;
    const std::size_t size = s.size();
    double total = 0.0;
    for_each_subset(all - s, [&](Coalition t) {
      const double weight = 1.0 / (static_cast<double>(n - size + 1) * detail::binom(n - size, t.size()));
      total += weight * discrete_derivative(table, s, t);
    });
    out.values.emplace(s, total);
  });
  return out;
}

/// Shapley-Taylor index: MIs below the top order, and the top order as
/// (k/n) sum_{T ⊆ N\S} Delta_S(T) / C(n-1, |T|).
template <Game G>
InteractionValues brute_force_stii(G& game, std::size_t order) {
  const auto table = exhaustive_values(game, kBruteForceIndexMaxPlayers);
  const std::size_t n = game.num_players();
  if (order < 1 || order > n) throw std::invalid_argument("order outside 1..n");
  auto out = detail::make_values(IndexKind::STII, order, n);
  const Coalition all = Coalition::full(n);
  for_each_subset_up_to(all, order, [&](Coalition s) {
    if (s.empty()) return;
    double total = 0.0;
    if (s.size() < order) {
      total = discrete_derivative(table, s, Coalition());
    } else {
      for_each_subset(all - s, [&](Coalition t) {
        total += discrete_derivative(table, s, t) / detail::binom(n - 1, t.size());
      });
      total *= static_cast<double>(order) / static_cast<double>(n);
    }
    out.values.emplace(s, total);
  });
  return out;
}

struct SamplingOptions {
  /// Maximum number of distinct game evaluations.
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  /// Cap on traversed permutations; 0 means `budget`. Needed because once
  /// every coalition is cached further permutations cost nothing.
  std::size_t max_permutations = 0;
  /// When set, sets outside this interaction set are never sampled and are
  /// reported as exact zeros.
  const InteractionSet* informed = nullptr;
};

struct SamplingResult {
  InteractionValues values;
  CoalitionMap standard_errors;
  std::size_t permutations = 0;
  std::size_t calls = 0;
};

/// Permutation-sampling estimator of SII up to `order` (order 1 gives the
/// Castro Shapley-value estimator).
///
/// In each permutation, every window of s consecutive players forms a set S
/// whose predecessors T are a draw from the SII weighting of N\S, so the mean
/// of Delta_S(T) over permutations is unbiased. Permutations are processed
/// whole: the run stops before one would push distinct evaluations past the
/// budget. Permutation p is drawn from its own stream of `seed`.
template <Game G>
SamplingResult permutation_sampling_sii(G& game, std::size_t order, const SamplingOptions& options) {
  const std::size_t n = game.num_players();
  if (order < 1 || order > n) throw std::invalid_argument("order outside 1..n");
  if (options.budget < n + 1) {
    throw InfeasibleError("budget " + std::to_string(options.budget) + " is below n+1 = " + std::to_string(n + 1));
  }
  const std::size_t max_permutations = options.max_permutations == 0 ? options.budget : options.max_permutations;

  struct Stats {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  std::unordered_map<Coalition, Stats, CoalitionHash> stats;
  CoalitionMap cache;
  std::vector<std::size_t> perm(n);
  std::vector<Coalition> prefix(n + 1);
  struct Window {
    Coalition set;
    Coalition before;
  };
  std::vector<Window> windows;
  std::vector<Coalition> fresh;
  std::unordered_set<Coalition, CoalitionHash> fresh_seen;

  SamplingResult result;
  for (std::size_t p = 0; p < max_permutations; ++p) {
    auto rng = SplitMix64::stream(options.seed, p);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span(perm));
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i].with(perm[i]);

    windows.clear();
    for (std::size_t s = 1; s <= order; ++s) {
      for (std::size_t i = 0; i + s <= n; ++i) {
        const Coalition set = prefix[i + s] - prefix[i];
        if (options.informed && !options.informed->contains(set)) continue;
        windows.push_back({set, prefix[i]});
      }
    }
    fresh.clear();
    fresh_seen.clear();
    for (const auto& w : windows) {
      for_each_subset(w.set, [&](Coalition l) {
        const Coalition c = w.before | l;
        if (!cache.contains(c) && fresh_seen.insert(c).second) fresh.push_back(c);
      });
    }
    if (cache.size() + fresh.size() > options.budget) break;
    const auto values = evaluate_all(game, fresh);
    for (std::size_t i = 0; i < fresh.size(); ++i) cache.emplace(fresh[i], values[i]);

    for (const auto& w : windows) {
      double delta = 0.0;
      for_each_subset(w.set, [&](Coalition l) {
        const double v = cache.at(w.before | l);
        delta += ((w.set.size() - l.size()) % 2 == 0) ? v : -v;
      });
      auto& st = stats[w.set];
      ++st.count;
      const double diff = delta - st.mean;
      st.mean += diff / static_cast<double>(st.count);
      st.m2 += diff * (delta - st.mean);
    }
    ++result.permutations;
  }
  if (result.permutations == 0) {
    throw InfeasibleError("budget " + std::to_string(options.budget) + " does not cover a single permutation");
  }

  result.values = detail::make_values(order == 1 ? IndexKind::SV : IndexKind::SII, order, n);
  result.calls = cache.size();
  result.values.call_count = cache.size();
  for_each_subset_up_to(Coalition::full(n), order, [&](Coalition s) {
    if (s.empty()) return;
    auto it = stats.find(s);
    if (it == stats.end()) {
      result.values.values.emplace(s, 0.0);
      result.standard_errors.emplace(s, 0.0);
      return;
    }
    const Stats& st = it->second;
    result.values.values.emplace(s, st.mean);
    const double se = st.count > 1 ? std::sqrt(st.m2 / static_cast<double>(st.count - 1) /
                                               static_cast<double>(st.count))
                                   : 0.0;
    result.standard_errors.emplace(s, se);
  });
  return result;
}

template <Game G>
SamplingResult permutation_sampling_sv(G& game, std::size_t budget, std::uint64_t seed,
                                       std::size_t max_permutations = 0) {
  SamplingOptions options;
  options.budget = budget;
  options.seed = seed;
  options.max_permutations = max_permutations;
  return permutation_sampling_sii(game, 1, options);
}

/// Off-receptive-field MI mass for a linear and a 2-layer-perceptron readout
/// sharing the same number of conv layers.
struct ReadoutAudit {
  std::size_t n = 0;
  std::size_t ell = 0;
  std::size_t interaction_set_size = 0;
  double linear_off_mass = 0.0;  ///< max |m(S)| over S outside the interaction set
  double mlp2_off_mass = 0.0;
  Coalition linear_argmax;
  Coalition mlp2_argmax;
};

inline ReadoutAudit audit_nonlinear_readout(const GnnModel& linear, const GnnModel& mlp2, const Graph& g,
                                            std::optional<std::vector<double>> baseline = std::nullopt) {
  if (g.num_nodes() > kBruteForceIndexMaxPlayers) {
    throw InfeasibleError("readout audit supports at most " + std::to_string(kBruteForceIndexMaxPlayers) + " nodes");
  }
  if (linear.num_layers() != mlp2.num_layers()) {
    throw std::invalid_argument("audited models must share the number of conv layers");
  }
  const std::vector<double> b = baseline ? *baseline : default_baseline(g);
  ReadoutAudit report;
  report.n = g.num_nodes();
  report.ell = linear.num_layers();
  const auto hoods = khop_neighborhoods(g, report.ell);
  const InteractionSet interactions = build_interaction_set(hoods);
  report.interaction_set_size = interactions.size();

  auto off_mass = [&](const GnnModel& model, Coalition& where) {
    GraphGame game(model, g, b);
    const auto mi = brute_force_mi(game);
    double worst = 0.0;
    for (const auto& [s, m] : mi.sorted()) {
      if (interactions.contains(s)) continue;
      if (std::abs(m) > worst) {
        worst = std::abs(m);
        where = s;
      }
    }
    return worst;
  };
  report.linear_off_mass = off_mass(linear, report.linear_argmax);
  report.mlp2_off_mass = off_mass(mlp2, report.mlp2_argmax);
  return report;
}

}  // namespace graphsi

#endif  // GRAPHSI_BASELINES_HPP
