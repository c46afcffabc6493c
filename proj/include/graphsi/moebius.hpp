#ifndef GRAPHSI_MOEBIUS_HPP
#define GRAPHSI_MOEBIUS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "graphsi/bounds.hpp"
#include "graphsi/coalition.hpp"
#include "graphsi/conversion.hpp"
#include "graphsi/errors.hpp"
#include "graphsi/game.hpp"
#include "graphsi/graph.hpp"
#include "graphsi/interaction_values.hpp"

namespace graphsi {

/// Default ceiling on sum_i 2^|N_i| accepted by exact computation.
inline constexpr std::uint64_t kDefaultBudgetCeiling = std::uint64_t{1} << 24;

/// Thrown when the non-trivial interaction set would exceed the budget
/// ceiling. Carries the call-bound chain and the largest MI order lambda whose
/// approximation fits under the ceiling.
class BudgetExceeded : public InfeasibleError {
 public:
  BudgetExceeded(CallBounds bounds, std::uint64_t ceiling, std::size_t suggested_lambda)
      : InfeasibleError("interaction budget exceeded: " + bounds.describe() + " > ceiling " +
                        std::to_string(ceiling) + "; try --lambda " + std::to_string(suggested_lambda)),
        bounds_(std::move(bounds)),
        ceiling_(ceiling),
        suggested_lambda_(suggested_lambda) {}

  const CallBounds& bounds() const { return bounds_; }
  std::uint64_t ceiling() const { return ceiling_; }
  std::size_t suggested_lambda() const { return suggested_lambda_; }

 private:
  CallBounds bounds_;
  std::uint64_t ceiling_;
  std::size_t suggested_lambda_;
};

/// Distinct coalitions in canonical order (size, then mask).
class InteractionSet {
 public:
  InteractionSet() = default;
  explicit InteractionSet(std::vector<Coalition> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end(), CanonicalLess{});
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    lookup_.insert(members_.begin(), members_.end());
  }

  std::size_t size() const { return members_.size(); }
  bool contains(Coalition s) const { return lookup_.contains(s); }
  const std::vector<Coalition>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

 private:
  std::vector<Coalition> members_;
  std::unordered_set<Coalition, CoalitionHash> lookup_;
};

namespace detail {

inline std::vector<Coalition> unique_hoods(const NeighborhoodIndex& hoods) {
  std::vector<Coalition> out = hoods.hoods;
  std::sort(out.begin(), out.end(), CanonicalLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

/// Upper estimate of coalitions enumerated by the lambda-truncated variant.
inline double truncated_cost(const NeighborhoodIndex& hoods, std::size_t lambda) {
  double total = 0.0;
  for (auto h : hoods.hoods) {
    for (std::size_t s = 0; s <= std::min(lambda, h.size()); ++s) total += binomial(h.size(), s);
    if (h.size() > lambda) total += 1.0;
  }
  return total;
}

inline std::size_t suggest_lambda(const NeighborhoodIndex& hoods, std::uint64_t ceiling) {
  std::size_t best = 1;
  for (std::size_t lambda = 1; lambda <= hoods.max_size(); ++lambda) {
    if (truncated_cost(hoods, lambda) > static_cast<double>(ceiling)) break;
    best = lambda;
  }
  return best;
}

inline void check_budget(const NeighborhoodIndex& hoods, std::uint64_t ceiling, std::size_t d_max) {
  std::vector<std::size_t> sizes;
  sizes.reserve(hoods.hoods.size());
  for (auto h : hoods.hoods) sizes.push_back(h.size());
  CallBounds bounds = call_bounds(sizes, d_max, hoods.ell);
  if (d_max == 0) bounds.dmax_bound.reset();
  if (!(bounds.sum_bound <= SaturatingCount(ceiling))) {
    throw BudgetExceeded(std::move(bounds), ceiling, suggest_lambda(hoods, ceiling));
  }
}

}  // namespace detail

/// The non-trivial interaction set: union of the power sets of all
/// receptive fields. `d_max` (0 = unknown) only enriches the error report.
inline InteractionSet build_interaction_set(const NeighborhoodIndex& hoods,
                                            std::uint64_t ceiling = kDefaultBudgetCeiling,
                                            std::size_t d_max = 0) {
  detail::check_budget(hoods, ceiling, d_max);
  std::unordered_set<Coalition, CoalitionHash> members;
  for (auto hood : detail::unique_hoods(hoods)) {
    if (members.contains(hood)) continue;  // already covered by a larger hood
    for_each_subset(hood, [&](Coalition s) { members.insert(s); });
  }
  return InteractionSet({members.begin(), members.end()});
}

/// Members of the interaction set with at most `lambda` players.
inline InteractionSet build_truncated_interaction_set(const NeighborhoodIndex& hoods, std::size_t lambda) {
  std::unordered_set<Coalition, CoalitionHash> members;
  for (auto hood : detail::unique_hoods(hoods)) {
    for_each_subset_up_to(hood, lambda, [&](Coalition s) { members.insert(s); });
  }
  return InteractionSet({members.begin(), members.end()});
}

/// m(S) = sum_{T ⊆ S} (-1)^{|S|-|T|} v(T) for any callable value lookup.
template <class Lookup>
  requires std::invocable<Lookup&, Coalition>
double moebius_transform(Coalition s, Lookup&& nu) {
  double total = 0.0;
  const std::size_t size = s.size();
  for_each_subset(s, [&](Coalition t) {
    const double v = nu(t);
    total += ((size - t.size()) % 2 == 0) ? v : -v;
  });
  return total;
}

/// Same, reading precomputed values; every subset of S must be present.
inline double moebius_transform(Coalition s, const CoalitionMap& values) {
  return moebius_transform(s, [&](Coalition t) {
    auto it = values.find(t);
    if (it == values.end()) throw std::logic_error("missing game value for subset " + to_string(t));
    return it->second;
  });
}

struct GraphShapIqResult {
  InteractionValues mi;
  InteractionValues si;
  double nu_full = 0.0;
  double nu_empty = 0.0;
};

namespace detail {

inline void require_linear_readout(const GraphGame& game) {
  if (!game.model().has_linear_readout()) {
    throw NonlinearReadout(
        "exact interactions require a linear pooling + readout; a nonlinear (mlp2) readout creates "
        "interactions outside the receptive fields");
  }
}

inline CoalitionMap evaluate_map(GraphGame& game, const std::vector<Coalition>& coalitions) {
  const auto values = game.evaluate_batch(coalitions);
  CoalitionMap out;
  out.reserve(coalitions.size());
  for (std::size_t i = 0; i < coalitions.size(); ++i) out.emplace(coalitions[i], values[i]);
  return out;
}

/// MIs of every subset of every hood via an in-place fast Möbius transform on
/// each hood's local power set. Hoods are visited largest first; a subset
/// keeps the value from the first hood that reaches it.
inline CoalitionMap hood_moebius(const NeighborhoodIndex& hoods, const CoalitionMap& nu) {
  std::vector<Coalition> order = unique_hoods(hoods);
  std::sort(order.begin(), order.end(), [](Coalition a, Coalition b) {
    return a.size() != b.size() ? a.size() > b.size() : a.bits() < b.bits();
  });
  CoalitionMap mi;
  mi.reserve(nu.size());
  std::vector<double> local;
  for (auto hood : order) {
    if (mi.contains(hood)) continue;
    const auto members = hood.members();
    const std::size_t h = members.size();
    const std::size_t count = std::size_t{1} << h;
    auto global = [&](std::size_t mask) {
      std::uint64_t bits = 0;
      for (std::size_t b = 0; b < h; ++b) {
        if ((mask >> b) & 1U) bits |= std::uint64_t{1} << members[b];
      }
      return Coalition(bits);
    };
    local.assign(count, 0.0);
    for (std::size_t mask = 0; mask < count; ++mask) local[mask] = nu.at(global(mask));
    for (std::size_t b = 0; b < h; ++b) {
      const std::size_t bit = std::size_t{1} << b;
      for (std::size_t mask = 0; mask < count; ++mask) {
        if (mask & bit) local[mask] -= local[mask ^ bit];
      }
    }
    for (std::size_t mask = 0; mask < count; ++mask) mi.try_emplace(global(mask), local[mask]);
  }
  return mi;
}

}  // namespace detail

/// Exact GraphSHAP-IQ: evaluates the game on exactly the non-trivial
/// interaction set, computes its MIs (all others are zero), and converts them
/// to the requested index of order k.
inline GraphShapIqResult graphshapiq_exact(GraphGame& game, const NeighborhoodIndex& hoods, std::size_t order,
                                           IndexKind kind = IndexKind::kSII,
                                           std::uint64_t ceiling = kDefaultBudgetCeiling) {
  detail::require_linear_readout(game);
  const std::size_t n = game.num_players();
  if (hoods.num_nodes() != n) throw std::invalid_argument("neighborhood index does not match the game");
  std::size_t d_max = 0;
  for (std::size_t i = 0; i < n; ++i) d_max = std::max(d_max, game.graph().degree(i));
  const InteractionSet interactions = build_interaction_set(hoods, ceiling, d_max);

  const CoalitionMap nu = detail::evaluate_map(game, interactions.members());
  GraphShapIqResult result;
  result.mi.kind = IndexKind::MI;
  result.mi.order = n;
  result.mi.n_players = n;
  result.mi.ell = hoods.ell;
  result.mi.values = detail::hood_moebius(hoods, nu);
  result.mi.call_count = game.call_count();
  result.nu_full = game.grand_value();
  result.nu_empty = game.evaluate(Coalition());
  result.si = mi_to_si(result.mi, kind, kind == IndexKind::MI ? n : order);
  return result;
}

/// Lambda-budget GraphSHAP-IQ.
///
/// MIs up to size lambda are computed exactly. Every receptive field larger
/// than lambda (processed by ascending size, then mask) receives the gap
/// between its game value and the sum of MIs already assigned to its proper
/// subsets. The largest such field (smallest mask on ties) then absorbs the
/// remaining efficiency gap so that all MIs sum to v(N). With no field larger
/// than lambda the result is exact.
inline GraphShapIqResult graphshapiq_approx(GraphGame& game, const NeighborhoodIndex& hoods, std::size_t lambda,
                                            std::size_t order, IndexKind kind = IndexKind::kSII) {
  detail::require_linear_readout(game);
  const std::size_t n = game.num_players();
  if (hoods.num_nodes() != n) throw std::invalid_argument("neighborhood index does not match the game");
  if (lambda < 1 || lambda > n) {
    throw std::invalid_argument("lambda " + std::to_string(lambda) + " outside 1.." + std::to_string(n));
  }

  const InteractionSet truncated = build_truncated_interaction_set(hoods, lambda);
  std::vector<Coalition> remaining;
  for (auto hood : detail::unique_hoods(hoods)) {
    if (hood.size() > lambda) remaining.push_back(hood);
  }
  // unique_hoods is already in canonical (size, mask) order

  std::vector<Coalition> to_evaluate = truncated.members();
  to_evaluate.insert(to_evaluate.end(), remaining.begin(), remaining.end());
  const CoalitionMap nu = detail::evaluate_map(game, to_evaluate);

  std::vector<std::pair<Coalition, double>> assigned;
  assigned.reserve(to_evaluate.size());
  for (auto s : truncated) assigned.emplace_back(s, moebius_transform(s, nu));
  for (auto s : remaining) {
    double recovered = 0.0;
    for (const auto& [t, m] : assigned) {
      if (t != s && t.is_subset_of(s)) recovered += m;
    }
    assigned.emplace_back(s, nu.at(s) - recovered);
  }

  const double nu_full = game.grand_value();
  if (!remaining.empty()) {
    Coalition largest = remaining.front();
    for (auto s : remaining) {
      if (s.size() > largest.size() || (s.size() == largest.size() && s.bits() < largest.bits())) largest = s;
    }
    double total = 0.0;
    for (const auto& [t, m] : assigned) total += m;
    const double gap = nu_full - total;
    for (auto& [t, m] : assigned) {
      if (t == largest) m += gap;
    }
  }

  GraphShapIqResult result;
  result.mi.kind = IndexKind::MI;
  result.mi.order = n;
  result.mi.n_players = n;
  result.mi.ell = hoods.ell;
  result.mi.lambda = lambda;
  for (const auto& [t, m] : assigned) result.mi.values.emplace(t, m);
  result.mi.call_count = game.call_count();
  result.nu_full = nu_full;
  result.nu_empty = nu.at(Coalition());
  result.si = mi_to_si(result.mi, kind, kind == IndexKind::MI ? n : order);
  return result;
}

}  // namespace graphsi

#endif  // GRAPHSI_MOEBIUS_HPP
