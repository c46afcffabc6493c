#ifndef GRAPHSI_COALITION_HPP
#define GRAPHSI_COALITION_HPP

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace graphsi {

/// Coalitions are 64-bit masks; games over more players are rejected.
inline constexpr std::size_t kMaxPlayers = 64;

/// A set of player (node) indices encoded as a bitmask.
///
/// Iteration over members is always in ascending index order. The default
/// three-way comparison orders by raw mask value; use CanonicalLess for the
/// size-then-mask order used by interaction sets and exports.
class Coalition {
 public:
  class Iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = std::size_t;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = std::size_t;

    constexpr Iterator() = default;
    constexpr explicit Iterator(std::uint64_t rest) : rest_(rest) {}

    constexpr std::size_t operator*() const {
      return static_cast<std::size_t>(std::countr_zero(rest_));
    }
    constexpr Iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    constexpr Iterator operator++(int) {
      Iterator copy = *this;
      ++*this;
      return copy;
    }
    constexpr bool operator==(const Iterator&) const = default;

   private:
    std::uint64_t rest_ = 0;
  };

  constexpr Coalition() = default;
  constexpr explicit Coalition(std::uint64_t bits) : bits_(bits) {}
  Coalition(std::initializer_list<std::size_t> members) {
    for (std::size_t i : members) *this = with(i);
  }

  static constexpr Coalition full(std::size_t n) {
    if (n > kMaxPlayers) throw std::out_of_range("coalition width exceeds 64 players");
    return Coalition(n == kMaxPlayers ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }
  static constexpr Coalition singleton(std::size_t i) { return Coalition().with(i); }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool empty() const { return bits_ == 0; }

  constexpr bool contains(std::size_t i) const {
    return i < kMaxPlayers && ((bits_ >> i) & 1U) != 0;
  }
  constexpr Coalition with(std::size_t i) const {
    if (i >= kMaxPlayers) throw std::out_of_range("player index exceeds 64");
    return Coalition(bits_ | (std::uint64_t{1} << i));
  }
  constexpr Coalition without(std::size_t i) const {
    if (i >= kMaxPlayers) return *this;
    return Coalition(bits_ & ~(std::uint64_t{1} << i));
  }
  constexpr bool is_subset_of(Coalition other) const { return (bits_ & ~other.bits_) == 0; }
  /// True when every member index is below n.
  constexpr bool fits(std::size_t n) const { return is_subset_of(full(n)); }

  constexpr Iterator begin() const { return Iterator(bits_); }
  constexpr Iterator end() const { return Iterator(0); }

  std::vector<std::size_t> members() const { return {begin(), end()}; }

  constexpr Coalition operator|(Coalition o) const { return Coalition(bits_ | o.bits_); }
  constexpr Coalition operator&(Coalition o) const { return Coalition(bits_ & o.bits_); }
  /// Set difference.
  constexpr Coalition operator-(Coalition o) const { return Coalition(bits_ & ~o.bits_); }

  constexpr auto operator<=>(const Coalition&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

/// Ascending by size, ties by ascending mask.
struct CanonicalLess {
  constexpr bool operator()(Coalition a, Coalition b) const {
    const auto sa = a.size();
    const auto sb = b.size();
    return sa != sb ? sa < sb : a.bits() < b.bits();
  }
};

struct CoalitionHash {
  std::size_t operator()(Coalition c) const noexcept {
    // splitmix64 finalizer
    std::uint64_t z = c.bits() + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

/// Visits every subset of `set` (including the empty set and `set`) in
/// ascending mask order.
template <class F>
void for_each_subset(Coalition set, F&& f) {
  const std::uint64_t mask = set.bits();
  std::uint64_t sub = 0;
  do {
    f(Coalition(sub));
    sub = (sub - mask) & mask;
  } while (sub != 0);
}

namespace detail {

template <class F>
void subsets_up_to(const std::vector<std::size_t>& members, std::size_t start,
                   std::uint64_t current, std::size_t remaining, F& f) {
  f(Coalition(current));
  if (remaining == 0) return;
  for (std::size_t idx = start; idx < members.size(); ++idx) {
    subsets_up_to(members, idx + 1, current | (std::uint64_t{1} << members[idx]), remaining - 1, f);
  }
}

}  // namespace detail

/// Visits every subset of `set` with at most `max_size` members, without
/// touching the (possibly huge) remainder of the power set.
template <class F>
void for_each_subset_up_to(Coalition set, std::size_t max_size, F&& f) {
  if (max_size >= set.size()) {
    for_each_subset(set, f);
    return;
  }
  const auto members = set.members();
  detail::subsets_up_to(members, 0, 0, max_size, f);
}

inline std::string to_string(Coalition c) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i : c) {
    if (!first) out += ',';
    out += std::to_string(i);
    first = false;
  }
  out += '}';
  return out;
}

}  // namespace graphsi

#endif  // GRAPHSI_COALITION_HPP
