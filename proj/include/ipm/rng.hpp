#pragma once

#include <cstdint>
#include <random>

namespace ipm {

// Finalizer-style mixer; used to derive independent per-task seeds from one
// master seed so that task i's stream does not depend on how many tasks ran
// before it (results stay reproducible under any scheduling order).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t task_index) {
  return master ^ splitmix64(task_index);
}

// mt19937_64 is fully specified by the standard, so the raw stream is
// platform-stable.  We avoid std::uniform_real_distribution (its output is
// implementation-defined) and map bits to doubles ourselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1) with 53 random bits; bit-identical everywhere.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Fair sign in {-1, +1}.
  int rademacher() { return (gen_() >> 63) ? 1 : -1; }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ipm
