#pragma once

#include <cstdint>
#include <limits>

namespace vecproc {

/// SplitMix64 finalizer; maps (seed, stream) pairs to well-mixed 64-bit seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// xoshiro256** with a portable polar-method normal sampler, so that every
/// replicate stream is reproducible bit-for-bit across platforms and
/// standard libraries. Each replicate gets its own stream id.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next(); }

  std::uint64_t next() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;
  double normal() noexcept;
  /// Rademacher sign, +1 or -1 with probability 1/2.
  int sign() noexcept { return (next() >> 63) ? 1 : -1; }

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace vecproc
