#pragma once

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace flocksim {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a over the bytes, seeded through the offset basis and
/// finalized with splitmix64. Byte-order independent.
std::uint64_t hash_bytes(std::string_view bytes, std::uint64_t seed) noexcept;

/// Seed for an independent stream identified by (master, key, tag, index).
/// Agents use their id as key and a stream name ("select", "env", ...) as tag.
std::uint64_t derive_seed(std::uint64_t master, std::string_view key,
                          std::string_view tag, std::uint64_t index = 0) noexcept;

/// Random stream with distribution code of our own, so draws do not depend on
/// the standard library's (implementation-defined) distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (one value per call).
  double normal();

  /// Poisson by multiplication of uniforms; large rates are split into
  /// chunks so exp(-lambda) never underflows.
  std::int64_t poisson(double lambda);

  double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace flocksim
