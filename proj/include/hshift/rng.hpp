#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace hshift {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-derived seed for an independent stream. Trials, device randomness
/// and solver randomness all branch off one root seed through this, so runs
/// replay exactly and streams stay decorrelated.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    return splitmix64(root ^ splitmix64(stream + 0x51ed2701a3c5e0fdULL));
}

/// mt19937_64 wrapper with portable integer/real draws (rejection sampling
/// instead of std::uniform_int_distribution, whose output is
/// implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform value in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) {
            throw std::invalid_argument("Rng::below: bound must be positive");
        }
        // Reject the tail so every residue is equally likely.
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % bound;
    }

    bool coin() { return (gen_() & 1ULL) != 0; }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 gen_;
};

} // namespace hshift
