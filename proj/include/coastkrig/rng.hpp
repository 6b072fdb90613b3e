#ifndef COASTKRIG_RNG_HPP
#define COASTKRIG_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace coastkrig {

/// Seeded random number generator. All variate transforms are implemented
/// here rather than through std::*_distribution so that a given seed
/// produces the same stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer on [0, n). Rejection-free Lemire reduction.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Standard normal via the polar method (spare value cached).
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Gamma(shape, scale); Marsaglia-Tsang for shape >= 1, boosted otherwise.
  double gamma(double shape, double scale);

  /// Inverse gamma with density b^a / Gamma(a) x^{-a-1} exp(-b/x).
  double inverse_gamma(double shape, double rate) {
    return 1.0 / gamma(shape, 1.0 / rate);
  }

  /// Fisher-Yates shuffle of 0..n-1.
  std::vector<int> permutation(int n);

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent stream seed from a base seed, splitmix64-style.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace coastkrig

#endif
