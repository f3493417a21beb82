#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace ganchain {

// SplitMix64 step. Used both as the core generator and for seed mixing.
inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Derives a sub-seed from (master, role, index). Pure, stable across
// platforms, and well spread so that pool members can run in parallel
// without sharing generator state.
inline uint64_t derive_seed(uint64_t master, std::string_view role, uint64_t index) {
  uint64_t s = master ^ fnv1a64(role);
  splitmix64(s);
  s ^= 0xA0761D6478BD642FULL + index * 0xE7037ED1A0B428DBULL;
  uint64_t out = splitmix64(s);
  out ^= splitmix64(s);
  return out;
}

// Small deterministic RNG. Self-contained on purpose: the standard library's
// distributions are implementation-defined, and reproducibility of training
// runs and latent batches is part of the contract here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    // Avoid log(0).
    if (u1 < 1e-300) u1 = 1e-300;
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  uint64_t fork_seed() { return next_u64(); }

 private:
  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ganchain
