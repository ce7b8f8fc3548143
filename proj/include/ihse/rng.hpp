#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "ihse/core.hpp"

namespace ihse {

/// Counter-based generator: the stream for sample `index` under `seed` is a
/// pure function of (seed, index, stream), so batches can be split across
/// threads without changing any draw. SplitMix64 output function.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0)
      : state_(mix(mix(seed ^ 0x6a09e667f3bcc909ULL) ^ mix(index + 0x3c6ef372fe94f82bULL) ^
                   mix(stream + 0xa54ff53a5f1d36f1ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(state_ += 0x9e3779b97f4a7c15ULL); }

  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(*this); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  std::normal_distribution<double> normal_;
};

/// Uniform point on the unit sphere in R^n.
Vec random_unit_vector(CounterRng& rng, Eigen::Index n);

/// Uniform point in the Euclidean ball of radius r in R^n.
Vec random_in_ball(CounterRng& rng, Eigen::Index n, double radius);

/// Volume of the Euclidean ball of radius r in R^n.
double ball_volume(int n, double radius);

}  // namespace ihse
