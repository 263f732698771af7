#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace active {

// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

// Seed for stream `index` under `master`. Distinct (master, index) pairs give
// decorrelated streams; the mapping is fixed so results are reproducible.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

// Deterministic random source. The engine is std::mt19937_64 (fully specified
// by the standard); variates come from Boost.Random, whose algorithms are
// fixed across platforms, unlike the std:: distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  // Unbiased integer in [0, bound).
  std::uint64_t uniform_index(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  double gamma(double shape);
  double beta(double a, double b);

  // Uniformly random permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// Rng for hypothesis `index` under a master seed; every per-hypothesis draw
// in the library comes from here so results are independent of thread count.
inline Rng hypothesis_rng(std::uint64_t master, std::uint64_t index) {
  return Rng(derive_seed(master, index));
}

}  // namespace active
