#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace iec {

// Thin wrapper around mt19937_64 that avoids std::uniform_*_distribution and
// std::shuffle, whose outputs are implementation-defined.  Everything here is
// pinned to the mt19937_64 bit stream, so identical seeds give identical
// results on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform on {0, ..., n-1}.  Modulo bias is below 2^-53 for any n that fits
  // in memory, which is irrelevant next to SGD noise.
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(gen_() % n);
  }

  // Fisher-Yates with explicit index draws.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = next_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace iec
