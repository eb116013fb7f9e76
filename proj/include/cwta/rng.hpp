#ifndef CWTA_RNG_HPP
#define CWTA_RNG_HPP

#include <bit>
#include <cstdint>
#include <random>

namespace cwta {

// SplitMix64 finalizer; the backbone of all derived-seed construction.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

template <typename... Rest>
constexpr std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b, Rest... rest) {
  return seed_mix(seed_mix(a, b), rest...);
}

inline std::uint64_t hash_double(double d) {
  return std::bit_cast<std::uint64_t>(d);
}

// Deterministic uniform stream. Seeds derived via seed_mix so that any
// patient / replication / permutation chunk can be recomputed independently
// of scheduling order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cwta

#endif  // CWTA_RNG_HPP
