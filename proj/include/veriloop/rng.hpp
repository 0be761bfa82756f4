#pragma once

#include <cstdint>
#include <random>

namespace veriloop {

// SplitMix64 (Steele/Lea/Flood). Used only to derive per-instance seeds.
struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() noexcept {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

// Deterministic per-instance random stream. The contract, fixed for
// reproducibility:
//
//   * a SplitMix64 stream is seeded with (master_seed xor purpose_salt) and
//     advanced instance_index + 1 steps; the last output seeds a
//     std::mt19937_64;
//   * all derived quantities below are computed from raw 64-bit draws with
//     the documented formulas, never via std:: distributions (whose outputs
//     differ across standard libraries).
//
// Identical (master_seed, purpose_salt, instance_index) therefore regenerate
// identical values on every platform.
class Rng {
public:
    Rng(std::uint64_t master_seed, std::uint64_t instance_index, std::uint64_t purpose_salt = 0) {
        SplitMix64 sm{master_seed ^ purpose_salt};
        std::uint64_t seed = sm.next();
        for (std::uint64_t i = 0; i < instance_index; ++i) seed = sm.next();
        eng_.seed(seed);
    }

    std::uint64_t next() { return eng_(); }

    // uniform double in [0, 1): top 53 bits of a draw
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n): fixed-point multiply (bias < 2^-64, fine here)
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    int int_in(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 eng_;
};

}  // namespace veriloop
