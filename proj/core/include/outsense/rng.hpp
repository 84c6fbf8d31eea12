#pragma once

#include <cstdint>
#include <initializer_list>

namespace outsense {

// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Folds a list of counters into a master seed: the result is
// master ^ H(c0, c1, ...), where H chains mix64 over the counters.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> counters) noexcept;

// Counter-based 64-bit generator (SplitMix64). The i-th output of a stream
// with seed s is mix64(s + (i + 1) * 0x9E3779B97F4A7C15), so any draw can be
// reproduced from (seed, position) alone in any language.
//
// Derived draws:
//   uniform()  = (next >> 11) * 2^-53, in [0, 1)
//   normal()   = Box-Muller on two uniforms u1, u2:
//                r = sqrt(-2 ln(1 - u1)), returns r cos(2 pi u2) and caches
//                r sin(2 pi u2) for the following call
//   below(n)   = high 64 bits of next * n (Lemire multiply-shift)
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;
  double uniform() noexcept;
  double normal() noexcept;
  std::uint64_t below(std::uint64_t n) noexcept;

  // Uniform draw keyed by (seed, index) without touching any stream.
  static double uniform_at(std::uint64_t seed, std::uint64_t index) noexcept;

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace outsense
