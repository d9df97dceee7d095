#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace creditseg {

// Seeded random stream with helpers that avoid std distributions and
// std::shuffle, whose output is implementation-defined. The mt19937_64
// engine itself is pinned by the standard, so results are reproducible
// across compilers for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_unit() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n), unbiased via rejection.
  std::size_t next_below(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  // Uniform in [lo, hi].
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    next_below(static_cast<std::size_t>(hi - lo + 1)));
  }

  double next_range(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[next_below(i)]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace creditseg
