#include "outsense/rng.hpp"

#include <cmath>
#include <numbers>

namespace outsense {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
}  // namespace

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> counters) noexcept {
  std::uint64_t h = 0x6A09E667F3BCC909ULL;
  for (std::uint64_t c : counters) h = mix64(h + kGolden + mix64(c + kGolden));
  return master ^ h;
}

std::uint64_t CounterRng::next() noexcept {
  state_ += kGolden;
  return mix64(state_);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>(next() >> 11) * kTwoPow53Inv;
}

double CounterRng::normal() noexcept {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
  __extension__ using Wide = unsigned __int128;
  const Wide product = static_cast<Wide>(next()) * static_cast<Wide>(n);
  return static_cast<std::uint64_t>(product >> 64);
}

double CounterRng::uniform_at(std::uint64_t seed, std::uint64_t index) noexcept {
  const std::uint64_t word = mix64(seed + (index + 1) * kGolden);
  return static_cast<double>(word >> 11) * kTwoPow53Inv;
}

}  // namespace outsense
