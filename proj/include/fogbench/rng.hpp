#pragma once
// Deterministic PRNG for reproducible simulation runs.
//
// splitmix64 core; every consumer derives its own stream from
// (experiment seed, job key) so serial and parallel execution produce
// identical outputs.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace fogbench {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        // splitmix64 (Steele, Lea, Flood 2014)
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Zero-mean Gaussian via Box-Muller (pairs cached).
    double gaussian(double sigma = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_ * sigma;
        }
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        spare_ = mag * std::sin(two_pi * u2);
        have_spare_ = true;
        return mag * std::cos(two_pi * u2) * sigma;
    }

    /// Mix a seed with a stream index into an independent stream seed.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        Rng r(seed ^ (0xA0761D6478BD642Full * (stream + 1)));
        return r.next_u64();
    }

    /// FNV-1a hash for deriving streams from stable string keys (file names).
    static std::uint64_t hash_key(std::string_view key) {
        std::uint64_t h = 0xCBF29CE484222325ull;
        for (unsigned char c : key) {
            h ^= c;
            h *= 0x100000001B3ull;
        }
        return h;
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace fogbench
