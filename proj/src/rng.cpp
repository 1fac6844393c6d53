#include "flocksim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace flocksim {

namespace {
constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;
}  // namespace

std::uint64_t hash_bytes(std::string_view bytes, std::uint64_t seed) noexcept {
  std::uint64_t h = kFnvOffset ^ splitmix64(seed);
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return splitmix64(h);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view key,
                          std::string_view tag, std::uint64_t index) noexcept {
  std::uint64_t h = splitmix64(master);
  h = hash_bytes(key, h);
  h = hash_bytes(tag, h);
  return splitmix64(h ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

std::size_t Rng::index(std::size_t n) {
  auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return std::min(i, n - 1);
}

double Rng::normal() {
  // 1 - u lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t Rng::poisson(double lambda) {
  if (!(lambda > 0.0)) return 0;
  constexpr double kChunk = 30.0;
  std::int64_t total = 0;
  while (lambda > 0.0) {
    const double rate = std::min(lambda, kChunk);
    lambda -= rate;
    const double limit = std::exp(-rate);
    double p = 1.0;
    std::int64_t k = -1;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    total += k;
  }
  return total;
}

}  // namespace flocksim
