#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace rmt {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);
std::uint64_t derive(std::uint64_t master, std::string_view tag, std::uint64_t index);
std::uint64_t fnv1a(std::string_view s);

// Counter-based generator: output k is mix64(key + k * golden).  Any
// (key, counter) pair can be reproduced without touching other streams.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix64(key_ + counter_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1).
  double uniform_open() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }
  double normal() { return normal_(*this); }
  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(*this); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_{};
};

// Independent stream for matrix entry (i, j) under a given seed.
inline CounterRng substream(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
  return CounterRng(derive(seed, i, j));
}

}  // namespace rmt
