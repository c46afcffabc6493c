#ifndef GRAPHSI_BOUNDS_HPP
#define GRAPHSI_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>

namespace graphsi {

/// Unsigned count that sticks at a saturation marker instead of wrapping.
class SaturatingCount {
 public:
  static constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

  constexpr SaturatingCount() = default;
  constexpr explicit SaturatingCount(std::uint64_t v) : value_(v) {}
  static constexpr SaturatingCount saturated() {
    SaturatingCount s(kMax);
    s.saturated_ = true;
    return s;
  }

  static constexpr SaturatingCount pow2(std::uint64_t exponent) {
    return exponent >= 64 ? saturated() : SaturatingCount(std::uint64_t{1} << exponent);
  }

  constexpr bool is_saturated() const { return saturated_; }
  constexpr std::uint64_t value() const { return value_; }

  /// log10 of the count; for saturated counts, of the exact quantity when
  /// the caller supplied one via with_log10(), else of 2^64.
  double log10() const { return log10_ ? *log10_ : std::log10(static_cast<double>(value_)); }
  SaturatingCount with_log10(double l) const {
    SaturatingCount s = *this;
    s.log10_ = l;
    return s;
  }

  friend constexpr SaturatingCount operator+(SaturatingCount a, SaturatingCount b) {
    if (a.saturated_ || b.saturated_ || a.value_ > kMax - b.value_) return saturated();
    return SaturatingCount(a.value_ + b.value_);
  }
  friend constexpr SaturatingCount operator*(SaturatingCount a, SaturatingCount b) {
    if (a.saturated_ || b.saturated_) return saturated();
    if (a.value_ != 0 && b.value_ > kMax / a.value_) return saturated();
    return SaturatingCount(a.value_ * b.value_);
  }
  /// Ordering where a saturated count exceeds every finite one.
  friend constexpr bool operator<=(SaturatingCount a, SaturatingCount b) {
    if (b.saturated_) return true;
    if (a.saturated_) return false;
    return a.value_ <= b.value_;
  }

  std::string to_string() const { return saturated_ ? std::string("saturated") : std::to_string(value_); }

 private:
  std::uint64_t value_ = 0;
  bool saturated_ = false;
  std::optional<double> log10_;
};

/// The model-call bound chain
///   |I| <= sum_i 2^|N_i| <= n 2^{n_max} <= n 2^{(d^{l+1}-1)/(d-1)}.
/// The last bound only applies for d_max >= 2.
struct CallBounds {
  std::size_t n = 0;
  std::size_t ell = 0;
  std::size_t n_max = 0;
  std::size_t d_max = 0;
  SaturatingCount sum_bound;
  SaturatingCount nmax_bound;
  std::optional<SaturatingCount> dmax_bound;

  std::string describe() const {
    std::string s = "|I| <= " + sum_bound.to_string() + " (sum 2^|N_i|) <= " + nmax_bound.to_string() +
                    " (n*2^n_max, n_max=" + std::to_string(n_max) + ")";
    if (dmax_bound) s += " <= " + dmax_bound->to_string() + " (d_max=" + std::to_string(d_max) + ")";
    return s;
  }
};

/// Receptive-field size bound (d^{l+1}-1)/(d-1) = 1 + d + ... + d^l, saturating.
inline SaturatingCount receptive_field_bound(std::size_t d_max, std::size_t ell) {
  SaturatingCount total(1);
  SaturatingCount term(1);
  for (std::size_t k = 0; k < ell; ++k) {
    term = term * SaturatingCount(d_max);
    total = total + term;
  }
  return total;
}

inline CallBounds call_bounds(std::span<const std::size_t> hood_sizes, std::size_t d_max, std::size_t ell) {
  CallBounds b;
  b.n = hood_sizes.size();
  b.ell = ell;
  b.d_max = d_max;
  double sum_exact = 0.0;  // for log10 of saturated sums
  for (std::size_t s : hood_sizes) {
    b.n_max = std::max(b.n_max, s);
    b.sum_bound = b.sum_bound + SaturatingCount::pow2(s);
    sum_exact += std::pow(2.0, static_cast<double>(s));
  }
  if (b.sum_bound.is_saturated()) b.sum_bound = b.sum_bound.with_log10(std::log10(sum_exact));
  const double ln2 = std::log10(2.0);
  b.nmax_bound = SaturatingCount(b.n) * SaturatingCount::pow2(b.n_max);
  if (b.nmax_bound.is_saturated()) {
    b.nmax_bound = b.nmax_bound.with_log10(std::log10(static_cast<double>(b.n)) + ln2 * static_cast<double>(b.n_max));
  }
  if (d_max >= 2) {
    const auto field = receptive_field_bound(d_max, ell);
    SaturatingCount bound = field.is_saturated() ? SaturatingCount::saturated()
                                                 : SaturatingCount(b.n) * SaturatingCount::pow2(field.value());
    if (bound.is_saturated()) {
      const double exponent = field.is_saturated()
                                  ? (std::pow(static_cast<double>(d_max), static_cast<double>(ell + 1)) - 1.0) /
                                        (static_cast<double>(d_max) - 1.0)
                                  : static_cast<double>(field.value());
      bound = bound.with_log10(std::log10(static_cast<double>(b.n)) + ln2 * exponent);
    }
    b.dmax_bound = bound;
  }
  return b;
}

}  // namespace graphsi

#endif  // GRAPHSI_BOUNDS_HPP
