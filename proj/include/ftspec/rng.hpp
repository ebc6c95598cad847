#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ftspec {

//! SplitMix64 finalizer.
constexpr std::uint64_t
mix64(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

//! Derives the seed of substream `stream` from a parent seed. Substreams of
//! distinct (seed, stream) pairs are statistically independent for all
//! practical purposes; the derivation is stable across platforms.
constexpr std::uint64_t
derive_seed(std::uint64_t seed, std::uint64_t stream)
{
  return mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

//! Counter-based generator: the n-th output is mix64(key + n * gamma), so a
//! stream is fully determined by its key and any position can be reached
//! without replaying the stream. Normal variates use Box-Muller so that the
//! sequence does not depend on the standard library implementation.
class CounterRng
{
public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
    : key_(derive_seed(seed, stream))
  {}

  std::uint64_t next_u64()
  {
    return mix64(key_ + (++counter_) * kGamma);
  }

  //! Uniform on (0, 1].
  double uniform()
  {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double radius = std::sqrt(-2.0 * std::log(uniform()));
    double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t position() const { return counter_; }

private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  std::uint64_t key_;
  std::uint64_t counter_{ 0 };
  double spare_{ 0.0 };
  bool has_spare_{ false };
};

} // namespace ftspec
