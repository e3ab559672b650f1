#pragma once

#include <cstdint>
#include <random>

#include "bdc/linalg.hpp"

namespace bdc {

// splitmix64 finalizer; derives independent substream seeds from a master
// seed so that parallel and serial schedules consume identical draws.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return mix_seed(a ^ mix_seed(b));
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                              std::uint64_t d) {
  return mix_seed(mix_seed(a, b, c), d);
}

// One stream per concurrent consumer. Draw order is part of the
// reproducibility contract: callers must not share a stream across workers.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }

  // n independent standard normal draws, battery-index order.
  Vec normal_vec(int n) {
    Vec z(n);
    for (int i = 0; i < n; ++i) z[i] = normal_(engine_);
    return z;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace bdc
