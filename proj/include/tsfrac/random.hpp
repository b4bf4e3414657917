#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace tsfrac {

/// splitmix64 finalizer; derives independent per-instance seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// mt19937_64 with distribution code written out, so draws are identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  /// Uniform integer in [lo, hi].
  std::size_t index(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(engine_() % (hi - lo + 1));
  }
  template <typename T, std::size_t N>
  const T& pick(const T (&items)[N]) {
    return items[index(0, N - 1)];
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tsfrac
