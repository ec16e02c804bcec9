#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace chronoskill {

// Deterministic random stream. mt19937_64 output is pinned by the standard;
// the distributions here are hand-rolled so that draws are bit-exact across
// platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0,1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes exactly two raw draws.
  double normal();

  // [0,n), unbiased via rejection.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
};

std::uint64_t splitmix64(std::uint64_t z);
std::uint64_t fnv1a64(std::string_view s);

// Stream seed for one role ("policy", "env", "sample", ...) under a master
// seed: splitmix64(master XOR fnv1a64(role)).
std::uint64_t derive_seed(std::uint64_t master, std::string_view role);

}  // namespace chronoskill
