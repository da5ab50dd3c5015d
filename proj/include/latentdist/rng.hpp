#pragma once

#include <cmath>
#include <cstdint>

namespace latentdist {

// Counter-based random numbers: every variate is a pure function of
// (seed, stream, counter), so simulation output is identical no matter how
// work is scheduled across threads.

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

class CounterRng {
 public:
  // Chain the key words through splitmix so substreams for distinct
  // (seed, a, b, ...) never collide in practice.
  explicit CounterRng(std::uint64_t seed) : state_(detail::splitmix64(seed)) {}

  CounterRng substream(std::uint64_t key) const {
    CounterRng r(*this);
    r.state_ = detail::splitmix64(r.state_ ^ detail::splitmix64(key + 0x100001b3ULL));
    return r;
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return detail::splitmix64(state_ ^ detail::splitmix64(counter * 0xd6e8feb86659fd93ULL + 0x2545f4914f6cdd1dULL));
  }

  // Uniform on (0,1), never exactly 0 or 1.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes counters 2k and 2k+1.
  double normal(std::uint64_t counter) const {
    double u1 = uniform(2 * counter);
    double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925287 * u2);
  }

 private:
  std::uint64_t state_;
};

// Sequential convenience wrapper over a CounterRng stream.
class RngStream {
 public:
  explicit RngStream(CounterRng rng) : rng_(rng) {}

  double uniform() { return rng_.uniform(next_++); }
  double normal() {
    double u1 = rng_.uniform(next_++);
    double u2 = rng_.uniform(next_++);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925287 * u2);
  }
  std::uint64_t bits() { return rng_.bits(next_++); }

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

}  // namespace latentdist
