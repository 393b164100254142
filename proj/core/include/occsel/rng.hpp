#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "occsel/normal.hpp"

namespace occsel {

namespace detail {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

// Stable sub-seed from (seed, role, two indices); the same keying RngStream
// uses, exposed so nested stream families (one seed per job, then per-role
// streams inside the job) stay collision-resistant and reproducible.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view role = "",
                                 std::uint64_t index0 = 0, std::uint64_t index1 = 0) {
  using detail::kGolden;
  using detail::mix64;
  std::uint64_t h = mix64(seed + kGolden);
  for (unsigned char c : role) h = mix64(h ^ (kGolden * (std::uint64_t(c) + 0x101)));
  h = mix64(h ^ mix64(index0 + kGolden));
  h = mix64(h ^ mix64(index1 + 2 * kGolden));
  return h;
}

// Deterministic RNG substream keyed by (seed, role, two indices). Every
// parallel job derives its own stream from the job index, so scheduling and
// worker count cannot change a single draw. Distributions are generated by
// fixed algorithms (inverse CDF), not std:: distribution objects, which are
// implementation-defined and would break byte-identical reports.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::string_view role = "",
                     std::uint64_t index0 = 0, std::uint64_t index1 = 0) {
    engine_.seed(derive_seed(seed, role, index0, index1));
  }

  // Uniform on the open interval (0,1).
  double uniform01() { return (double(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() { return norm_quantile(uniform01()); }

  double exponential() { return -std::log(uniform01()); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace occsel
