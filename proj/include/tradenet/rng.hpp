#pragma once

#include <cstdint>
#include <cmath>

namespace tradenet {

// Counter-free xoshiro256** stream with splitmix64 seeding. The standard
// library distributions are implementation-defined, so all draws (uniform,
// normal) are mapped explicitly here to keep runs bit-reproducible across
// compilers and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  // Dedicated per-firm stream: serial and parallel simulation must consume
  // identical draws, so each firm owns a stream keyed by (master_seed, id).
  static Rng for_firm(std::uint64_t master_seed, std::uint64_t firm_id) {
    return Rng(master_seed ^ splitmix_once(firm_id + 0x9e3779b97f4a7c15ULL));
  }

  // Derived stream for a named side-experiment (e.g. post-shock search),
  // independent of how much of the main stream was consumed.
  static Rng for_purpose(std::uint64_t master_seed, std::uint64_t firm_id,
                         std::uint64_t purpose_salt) {
    return Rng(master_seed ^ splitmix_once(firm_id * 0x2545f4914f6cdd1dULL + purpose_salt));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller; always consumes exactly two uniforms and discards the second
  // variate so the stream layout does not depend on call parity.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();  // log(0) guard, astronomically rare
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t splitmix_once(std::uint64_t x) { return splitmix64(x); }

  std::uint64_t state_[4];
};

}  // namespace tradenet
