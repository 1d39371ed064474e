#ifndef SCMA_RNG_HPP
#define SCMA_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace scma {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256** (Blackman/Vigna, public domain). Chosen over mt19937_64 so a
/// fresh stream can be derived per trial in O(1); every random draw in the
/// library flows through streams keyed by (seed, context indices), which is
/// what makes results independent of worker count.
class Xoshiro256ss {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256ss(std::uint64_t seed) {
    for (auto& word : s_) word = splitmix64(seed);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_;
};

/// Independent stream for a (seed, a, b, c) key. Distinct keys give
/// uncorrelated streams regardless of the order they are created in.
inline Xoshiro256ss derive_stream(std::uint64_t seed, std::uint64_t a,
                                  std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t state = seed;
  std::uint64_t mixed = splitmix64(state);
  state ^= a * 0x9e3779b97f4a7c15ULL;
  mixed ^= splitmix64(state);
  state ^= b * 0xc2b2ae3d27d4eb4fULL;
  mixed ^= splitmix64(state);
  state ^= c * 0x165667b19e3779f9ULL;
  mixed ^= splitmix64(state);
  return Xoshiro256ss(mixed);
}

/// Uniform double in [0, 1), 53-bit resolution.
template <typename Gen>
double uniform_unit(Gen& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

template <typename Gen>
double uniform_range(Gen& gen, double lo, double hi) {
  return lo + uniform_unit(gen) * (hi - lo);
}

/// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
template <typename Gen>
std::uint64_t uniform_below(Gen& gen, std::uint64_t n) {
  if ((n & (n - 1)) == 0) return gen() & (n - 1);
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return x % n;
}

/// Standard normal via Box-Muller; exactly two uniform draws per sample so
/// streams stay reproducible across call sites.
template <typename Gen>
double standard_normal(Gen& gen) {
  double u1 = uniform_unit(gen);
  const double u2 = uniform_unit(gen);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace scma

#endif
