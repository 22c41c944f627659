#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace scsim {

/// splitmix64 step; also the seed-derivation primitive.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Deterministic per-consumer seed: stream k of a master seed is
/// splitmix64 applied k+1 times. Documented counter scheme for every
/// random consumer in the project.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master;
    std::uint64_t out = splitmix64(s);
    for (std::uint64_t i = 0; i < stream; ++i) out = splitmix64(s);
    return out;
}

/// Seeded generator with locale/implementation-independent draws.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    static Rng stream(std::uint64_t master, std::uint64_t stream_index) {
        return Rng(derive_seed(master, stream_index));
    }

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (no cached spare, fully deterministic).
    double normal() {
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Index draw from a probability vector. Zero-probability cells can
    /// never fire: the comparison is strict on cumulative sums.
    int categorical(std::span<const double> probs) {
        const double u = uniform01();
        double cum = 0.0;
        for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
            cum += probs[k];
            if (u < cum && probs[k] > 0.0) return static_cast<int>(k);
        }
        // last nonempty cell catches the remainder
        for (std::size_t k = probs.size(); k-- > 0;)
            if (probs[k] > 0.0) return static_cast<int>(k);
        return 0;
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace scsim
