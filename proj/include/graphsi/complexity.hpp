#ifndef GRAPHSI_COMPLEXITY_HPP
#define GRAPHSI_COMPLEXITY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "graphsi/bounds.hpp"
#include "graphsi/graph.hpp"
#include "graphsi/parallel.hpp"

namespace graphsi {

/// Interaction sets are only enumerated when the largest receptive field
/// has at most this many nodes; otherwise the sum bound stands in.
inline constexpr std::size_t kEnumerationCutoff = 23;

/// |union_i P(N_i)| for arbitrary n, without materializing the union.
///
/// Each subset is counted at the first hood (by node index) containing it:
/// for hood i, the local masks of H_i ∩ H_j (j < i) are marked and closed
/// downward with a subset-lattice sweep, and the uncovered local masks are
/// counted. Cost is O(sum_i |N_i| 2^|N_i|).
inline std::uint64_t count_interactions(const std::vector<std::vector<std::size_t>>& hoods) {
  std::size_t n = 0;
  for (const auto& h : hoods) {
    for (std::size_t v : h) n = std::max(n, v + 1);
  }
  std::vector<std::vector<std::size_t>> containing(n);  // node -> hoods containing it
  std::vector<std::size_t> position(n, static_cast<std::size_t>(-1));
  std::vector<char> covered;
  std::vector<std::size_t> stamp(hoods.size(), static_cast<std::size_t>(-1));
  std::uint64_t total = 0;

  for (std::size_t i = 0; i < hoods.size(); ++i) {
    const auto& hood = hoods[i];
    const std::size_t h = hood.size();
    if (h >= 63) throw std::invalid_argument("hood too large to enumerate");
    const std::size_t count = std::size_t{1} << h;
    covered.assign(count, 0);
    if (i > 0) covered[0] = 1;  // the empty set belongs to every earlier hood
    for (std::size_t b = 0; b < h; ++b) position[hood[b]] = b;

    for (std::size_t v : hood) {
      for (std::size_t j : containing[v]) {
        if (stamp[j] == i) continue;
        stamp[j] = i;
        std::size_t mask = 0;
        for (std::size_t u : hoods[j]) {
          if (position[u] != static_cast<std::size_t>(-1)) mask |= std::size_t{1} << position[u];
        }
        covered[mask] = 1;
      }
    }
    for (std::size_t b = 0; b < h; ++b) {
      const std::size_t bit = std::size_t{1} << b;
      for (std::size_t mask = 0; mask < count; ++mask) {
        if (!(mask & bit) && covered[mask | bit]) covered[mask] = 1;
      }
    }
    for (std::size_t mask = 0; mask < count; ++mask) total += covered[mask] ? 0 : 1;

    for (std::size_t v : hood) position[v] = static_cast<std::size_t>(-1);
    for (std::size_t v : hood) containing[v].push_back(i);
  }
  return total;
}

struct CallEstimate {
  std::optional<std::uint64_t> exact;  ///< |I| when enumerated
  CallBounds bounds;
  GraphStats stats;
  std::size_t n = 0;

  /// log10 of the call count used for comparisons: exact when known,
  /// otherwise the sum bound.
  double calls_log10() const {
    return exact ? std::log10(static_cast<double>(*exact)) : bounds.sum_bound.log10();
  }
  /// log10(2^n / calls).
  double speedup_log10() const { return static_cast<double>(n) * std::log10(2.0) - calls_log10(); }
};

/// Pre-flight model-call estimate: |I| (if the largest receptive field is
/// small enough to enumerate) and the full bound chain. Works for any n.
inline CallEstimate estimate_calls(const Graph& g, std::size_t ell) {
  CallEstimate est;
  est.n = g.num_nodes();
  const auto hoods = neighborhood_members(g, ell);
  est.stats = graph_stats(g, ell);
  std::vector<std::size_t> sizes;
  sizes.reserve(hoods.size());
  for (const auto& h : hoods) sizes.push_back(h.size());
  est.bounds = call_bounds(sizes, est.stats.d_max, ell);
  if (est.stats.n_max <= kEnumerationCutoff) est.exact = count_interactions(hoods);
  return est;
}

struct ScalingRow {
  std::string graph_id;
  std::size_t n = 0;
  std::size_t ell = 0;
  CallEstimate estimate;
  double density = 0.0;
};

/// Least-squares fit y = intercept + slope * x with its R².
struct LinearFit {
  std::size_t samples = 0;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  /// Fewer than two samples or no variance in x or y.
  bool degenerate = true;
};

inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  LinearFit fit;
  fit.samples = x.size();
  if (x.size() < 2 || x.size() != y.size()) return fit;
  const double nx = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= nx;
  my /= nx;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = std::min(1.0, (sxy * sxy) / (sxx * syy));
  fit.degenerate = false;
  return fit;
}

/// Per-ell fits of log10(calls) against graph size: `log_curve` regresses on
/// ln(n) (calls growing like a power of n, the shape of linear growth on a
/// log axis), `linear` regresses on n itself.
struct ScalingFit {
  std::size_t ell = 0;
  LinearFit log_curve;
  LinearFit linear;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  std::vector<ScalingFit> fits;
};

struct NamedGraph {
  std::string id;
  Graph graph;
};

inline ScalingStudy scaling_study(std::span<const NamedGraph> graphs, std::span<const std::size_t> ells,
                                  std::size_t threads = 1) {
  ScalingStudy study;
  study.rows.resize(graphs.size() * ells.size());
  parallel_for(study.rows.size(), threads, [&](std::size_t idx) {
    const auto& named = graphs[idx / ells.size()];
    const std::size_t ell = ells[idx % ells.size()];
    ScalingRow row;
    row.graph_id = named.id;
    row.n = named.graph.num_nodes();
    row.ell = ell;
    row.estimate = estimate_calls(named.graph, ell);
    row.density = row.estimate.stats.density;
    study.rows[idx] = std::move(row);
  });
  for (std::size_t ell : ells) {
    std::vector<double> log_n, n, y;
    for (const auto& row : study.rows) {
      if (row.ell != ell) continue;
      n.push_back(static_cast<double>(row.n));
      log_n.push_back(std::log(static_cast<double>(row.n)));
      y.push_back(row.estimate.calls_log10());
    }
    study.fits.push_back({ell, fit_line(log_n, y), fit_line(n, y)});
  }
  return study;
}

namespace detail {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// CSV with columns graph_id,n,ell,calls,is_exact,density,speedup_log10.
/// Bound-only rows report the sum bound; a saturated bound is written in
/// scientific notation from its log10.
inline void write_scaling_csv(std::ostream& out, const ScalingStudy& study) {
  out << "graph_id,n,ell,calls,is_exact,density,speedup_log10\n";
  for (const auto& row : study.rows) {
    std::string calls;
    const auto& est = row.estimate;
    if (est.exact) {
      calls = std::to_string(*est.exact);
    } else if (!est.bounds.sum_bound.is_saturated()) {
      calls = std::to_string(est.bounds.sum_bound.value());
    } else {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.6e", std::pow(10.0, est.bounds.sum_bound.log10()));
      calls = buf;
    }
    out << row.graph_id << ',' << row.n << ',' << row.ell << ',' << calls << ',' << (est.exact ? 1 : 0) << ','
        << detail::format_g17(row.density) << ',' << detail::format_g17(est.speedup_log10()) << '\n';
  }
}

}  // namespace graphsi

#endif  // GRAPHSI_COMPLEXITY_HPP
