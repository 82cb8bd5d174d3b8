#pragma once

#include <cstdint>
#include <limits>

#include "risradar/types.hpp"

namespace risradar {

/// Counter-based generator: the i-th draw of stream (seed, stream) is a pure
/// function of (seed, stream, i), so per-trial streams are reproducible no
/// matter how trials are scheduled.
class CounterRng {
public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Uniform phase on [0, 2pi).
  double phase();
  /// Standard normal via Box-Muller.
  double normal();
  /// Circularly-symmetric complex Gaussian with E|x|^2 = 1.
  Complex complexNormal();

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

} // namespace risradar
