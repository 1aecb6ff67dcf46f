// Seeded deterministic RNG (splitmix64 core).
//
// Every random draw in the library flows through this generator so that a run
// is a pure function of its seed: same seed, same bytes, on any host and with
// any worker count. Gaussian draws use Box-Muller and Laplace draws use the
// inverse CDF, both on the raw 53-bit uniform stream; no libstdc++
// distribution objects are involved (their output is not pinned by the
// standard).
#pragma once

#include <cmath>
#include <cstdint>

#include "ddl/types.hpp"

namespace ddl {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed = 1) : state_(seed) {}

    std::uint64_t next_u64() { return detail::splitmix64(state_); }

    // Uniform in [0, 1) with 53 random bits.
    Scalar uniform() { return static_cast<Scalar>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; consumes exactly two uniforms.
    Scalar gaussian() {
        Scalar u1 = uniform();
        Scalar u2 = uniform();
        if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Laplace(0, 1), density (1/2) e^{-|x|}, via inverse CDF; one uniform per draw.
    Scalar laplace() {
        Scalar u = uniform() - 0.5;
        Scalar a = std::abs(u);
        if (a > 0.5 - 0x1.0p-54) a = 0.5 - 0x1.0p-54;
        return (u < 0.0 ? 1.0 : -1.0) * std::log1p(-2.0 * a);
    }

    bool bernoulli(Scalar p) { return uniform() < p; }

    // Uniform index in [0, n); Lemire reduction, no modulo bias.
    Index uniform_index(Index n) {
        return static_cast<Index>(
            (static_cast<unsigned __int128>(next_u64()) * static_cast<std::uint64_t>(n)) >> 64);
    }

  private:
    std::uint64_t state_;
};

// Child stream derivation: child = hash(master, stream). Used to hand each
// node (and each synthesis stage) its own independent stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master;
    std::uint64_t a = detail::splitmix64(s);
    s ^= stream * 0x9E3779B97F4A7C15ULL;
    std::uint64_t b = detail::splitmix64(s);
    return a ^ (b + 0x2545F4914F6CDD1DULL);
}

}  // namespace ddl
