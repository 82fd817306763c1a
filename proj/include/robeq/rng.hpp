#pragma once

#include <cstdint>
#include <limits>

namespace robeq {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: the i-th output is a pure function of (key, i).
// Streams are split by deriving child keys, so (seed, run, player) maps to an
// independent stream without any shared state. Satisfies
// UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng() = default;
  explicit CounterRng(std::uint64_t key) : key_(mix64(key)) {}

  // Independent child stream.
  CounterRng split(std::uint64_t id) const {
    CounterRng c;
    c.key_ = mix64(key_ ^ mix64(id + 0x632be59bd9b4e019ULL));
    return c;
  }

  static CounterRng stream(std::uint64_t seed, std::uint64_t run, std::uint64_t player) {
    return CounterRng(seed).split(run).split(player);
  }

  result_type operator()() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++); }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  std::uint64_t key_ = mix64(0);
  std::uint64_t counter_ = 0;
};

}  // namespace robeq
