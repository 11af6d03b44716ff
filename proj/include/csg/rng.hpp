#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace csg {

// One seeded sub-stream of the run's root seed.  Streams are derived
// counter-style from (root, name) so adding draws to one consumer never
// perturbs another's sequence.
class RngStream {
 public:
  RngStream() : gen_(0) {}
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::mt19937_64& gen() { return gen_; }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
    return d(gen_);
  }

  double normal() {
    return std::normal_distribution<double>(0.0, 1.0)(gen_);
  }

 private:
  std::mt19937_64 gen_;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

// Named sub-stream derivation from a single root seed.
inline RngStream derive_stream(std::uint64_t root_seed, std::string_view name) {
  return RngStream(detail::splitmix64(root_seed ^ detail::fnv1a(name)));
}

}  // namespace csg
