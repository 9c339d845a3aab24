#include "plap/rng.hpp"

#include <cmath>

namespace plap {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(RngSeed s)
    : seed_(s), key_(mix64(s.seed ^ mix64(s.stream + kGolden) ^ 0x6A09E667F3BCC909ULL)) {}

std::uint64_t CounterRng::next() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double CounterRng::uniform_open0() {
  return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double CounterRng::geometric_skip(double probability) {
  if (probability >= 1.0) return 0.0;
  return std::floor(std::log(uniform_open0()) / std::log1p(-probability));
}

double CounterRng::normal() {
  // Box-Muller, one output per call.
  const double u1 = uniform_open0();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

RngSeed split(RngSeed parent, std::uint64_t purpose) {
  return {parent.seed, mix64(parent.stream ^ mix64(purpose + 0x3C6EF372FE94F82BULL))};
}

}  // namespace plap
