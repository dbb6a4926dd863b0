#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace clickcascade {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives an independent child seed from (parent, stream). The mapping is
/// splitmix64(parent + 0x9E3779B97F4A7C15 * (stream + 1)) and is part of the
/// reproducibility contract: changing it changes every simulated output.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept;

/// Portable random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; every distribution is implemented here
/// rather than taken from <random>, whose distributions are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via the Marsaglia polar method.
  double normal();

  /// Gamma(shape, 1) via Marsaglia-Tsang.
  double gamma(double shape);

  /// Beta(a, b) as a ratio of gammas.
  double beta(double a, double b);

  /// In-place Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(values[i - 1], values[j]);
    }
  }

  /// k distinct values drawn uniformly from `pool` (order of draw preserved).
  template <class T>
  std::vector<T> sample(std::vector<T> pool, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + uniform_index(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace clickcascade
