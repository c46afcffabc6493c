#ifndef GRAPHSI_CONVERSION_HPP
#define GRAPHSI_CONVERSION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "graphsi/coalition.hpp"
#include "graphsi/interaction_values.hpp"

namespace graphsi {

using Rational = boost::multiprecision::cpp_rational;

/// Bernoulli numbers B_0..B_m as exact rationals, convention B_1 = -1/2.
///
/// Computed with the Akiyama-Tanigawa recurrence (which yields B_1 = +1/2;
/// the sign of B_1 is flipped afterwards).
class BernoulliTable {
 public:
  explicit BernoulliTable(std::size_t max_index) : values_(max_index + 1) {
    std::vector<Rational> row(max_index + 1);
    for (std::size_t m = 0; m <= max_index; ++m) {
      row[m] = Rational(1, static_cast<long long>(m + 1));
      for (std::size_t j = m; j >= 1; --j) row[j - 1] = Rational(static_cast<long long>(j)) * (row[j - 1] - row[j]);
      values_[m] = row[0];
    }
    if (max_index >= 1) values_[1] = Rational(-1, 2);
  }

  std::size_t max_index() const { return values_.size() - 1; }
  const Rational& exact(std::size_t index) const { return values_.at(index); }
  double operator[](std::size_t index) const { return static_cast<double>(values_.at(index)); }

 private:
  std::vector<Rational> values_;
};

namespace detail {

inline Rational binomial_exact(std::size_t n, std::size_t k) {
  if (k > n) return Rational(0);
  boost::multiprecision::cpp_int result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    result *= static_cast<unsigned long long>(n - k + i);
    result /= static_cast<unsigned long long>(i);
  }
  return Rational(result);
}

}  // namespace detail

/// Distribution weights w[t][s]: the share of an MI on a set of size t that
/// lands on each of its subsets of size s (1 <= s <= order).
class ConversionWeights {
 public:
  ConversionWeights(IndexKind kind, std::size_t order, std::size_t n_players)
      : kind_(kind), order_(order), table_(n_players + 1, std::vector<double>(order + 1, 0.0)) {
    BernoulliTable bernoulli(kind == IndexKind::kSII ? order : 1);
    for (std::size_t t = 1; t <= n_players; ++t) {
      for (std::size_t s = 1; s <= std::min(order, t); ++s) table_[t][s] = compute(t, s, bernoulli);
    }
  }

  double operator()(std::size_t t, std::size_t s) const { return table_.at(t).at(s); }

 private:
  double compute(std::size_t t, std::size_t s, const BernoulliTable& bernoulli) const {
    switch (kind_) {
      case IndexKind::MI:
        return t == s ? 1.0 : 0.0;
      case IndexKind::SV:
        return s == 1 ? 1.0 / static_cast<double>(t) : 0.0;
      case IndexKind::SII:
        return 1.0 / static_cast<double>(t - s + 1);
      case IndexKind::kSII: {
        // k-SII(S) = sum_{r=s}^{k} B_{r-s} sum_{|R|=r, R ⊇ S} SII(R), with
        // SII(R) = sum_{T ⊇ R} m(T) / (|T|-|R|+1). Collecting the terms of one
        // m(T) gives sum_j B_j C(t-s, j) / (t-s-j+1), j = 0..min(k-s, t-s).
        const std::size_t m = t - s;
        Rational w(0);
        for (std::size_t j = 0; j <= std::min(order_ - s, m); ++j) {
          w += bernoulli.exact(j) * detail::binomial_exact(m, j) / Rational(static_cast<long long>(m - j + 1));
        }
        return static_cast<double>(w);
      }
      case IndexKind::STII:
        if (s < order_) return t == s ? 1.0 : 0.0;
        return static_cast<double>(Rational(1) / detail::binomial_exact(t, order_));
    }
    return 0.0;
  }

  IndexKind kind_;
  std::size_t order_;
  std::vector<std::vector<double>> table_;
};

/// Converts Möbius interactions into the requested index up to `order`.
///
/// Every MI on a set T contributes w(|T|, |S|) * m(T) to each subset S of T
/// with 1 <= |S| <= order, so cost depends on the MI support only. The empty
/// set's MI is never distributed. MI entries are processed in canonical order
/// so results are reproducible bit for bit.
inline InteractionValues mi_to_si(const InteractionValues& mi, IndexKind kind, std::size_t order) {
  if (mi.kind != IndexKind::MI) throw std::invalid_argument("conversion expects Möbius interactions");
  const std::size_t n = mi.n_players;
  if (kind == IndexKind::SV) order = 1;
  if (kind == IndexKind::MI) order = n;
  if (order < 1 || order > n) {
    throw std::invalid_argument("order " + std::to_string(order) + " outside 1.." + std::to_string(n));
  }
  InteractionValues out;
  out.kind = kind;
  out.order = order;
  out.n_players = n;
  out.ell = mi.ell;
  out.lambda = mi.lambda;
  out.call_count = mi.call_count;

  const ConversionWeights weights(kind, order, n);
  for (const auto& [support, m] : mi.sorted()) {
    const std::size_t t = support.size();
    if (t == 0) continue;
    if (kind == IndexKind::MI) {
      out.values[support] += m;
      continue;
    }
    if (kind == IndexKind::STII) {
      // lower STII orders are the MIs themselves
      if (t < order) {
        out.values[support] += m;
        continue;
      }
      const double w = weights(t, order);
      for_each_subset_up_to(support, order, [&](Coalition s) {
        if (s.size() == order) out.values[s] += w * m;
      });
      continue;
    }
    for_each_subset_up_to(support, order, [&](Coalition s) {
      if (s.empty()) return;
      out.values[s] += weights(t, s.size()) * m;
    });
  }
  return out;
}

inline InteractionValues mi_to_sv(const InteractionValues& mi) { return mi_to_si(mi, IndexKind::SV, 1); }
inline InteractionValues mi_to_sii(const InteractionValues& mi, std::size_t order) {
  return mi_to_si(mi, IndexKind::SII, order);
}
inline InteractionValues mi_to_ksii(const InteractionValues& mi, std::size_t order) {
  return mi_to_si(mi, IndexKind::kSII, order);
}
inline InteractionValues mi_to_stii(const InteractionValues& mi, std::size_t order) {
  return mi_to_si(mi, IndexKind::STII, order);
}

/// |sum of non-empty interactions - (v(N) - v(empty))|.
inline double efficiency_check(const InteractionValues& si, double nu_full, double nu_empty) {
  return std::abs(si.sum_nonempty() - (nu_full - nu_empty));
}

}  // namespace graphsi

#endif  // GRAPHSI_CONVERSION_HPP
