#include "risradar/rng.hpp"

#include <cmath>

namespace risradar {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL))) {}

CounterRng::result_type CounterRng::operator()() {
  return mix64(key_ + 0xd1342543de82ef95ULL * counter_++);
}

double CounterRng::uniform() {
  // 53 random bits, shifted off zero
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::phase() { return 2.0 * kPi * (uniform() - 0x1.0p-54); }

double CounterRng::normal() {
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  return r * std::cos(2.0 * kPi * uniform());
}

Complex CounterRng::complexNormal() {
  const double r = std::sqrt(-std::log(uniform()));
  const double t = 2.0 * kPi * uniform();
  return {r * std::cos(t), r * std::sin(t)};
}

} // namespace risradar
