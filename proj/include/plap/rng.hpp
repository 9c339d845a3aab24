#pragma once

#include <cstdint>
#include <limits>

namespace plap {

/// Identifies one reproducible random stream.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Counter-based generator: the k-th output is a fixed hash of
/// (seed, stream, k), so streams are independent of call interleaving and
/// of which thread consumes them. Distributions are implemented here rather
/// than taken from <random> so outputs are identical across standard
/// libraries.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(RngSeed s);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  std::uint64_t next();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in (0, 1]; safe for log().
  double uniform_open0();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double probability) { return uniform() < probability; }
  /// Failures before the first success of a Bernoulli(probability) sequence,
  /// probability in (0, 1]. Returned as double to cover skips past 2^64.
  double geometric_skip(double probability);
  double normal();

  RngSeed seed() const { return seed_; }
  std::uint64_t position() const { return counter_; }

 private:
  RngSeed seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

/// Derives an independent stream for a (parent, purpose) pair.
RngSeed split(RngSeed parent, std::uint64_t purpose);

}  // namespace plap
