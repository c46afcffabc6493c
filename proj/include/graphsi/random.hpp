#ifndef GRAPHSI_RANDOM_HPP
#define GRAPHSI_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>

namespace graphsi {

/// SplitMix64: the k-th output is a fixed function of (seed, k), so streams
/// replicate across platforms and standard libraries. Distributions are
/// implemented here for the same reason (std:: distributions are not
/// portable).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  /// Independent stream for a (seed, stream id) pair.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t id) {
    SplitMix64 mixer(seed ^ (id * 0xd1342543de82ef95ULL));
    return SplitMix64(mixer.next() ^ id);
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), rejection-sampled (no modulo bias).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  /// Standard normal via Box-Muller (one variate per call).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace graphsi

#endif  // GRAPHSI_RANDOM_HPP
