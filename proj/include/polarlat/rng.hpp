/*
Seeded pseudorandom utilities shared by encoder, decoder, and simulation harness.

Every stream carries explicit state and every draw is a pure function of the seed,
so identical seeds give identical results regardless of thread scheduling or
platform standard library.
*/

#pragma once

#include <cstdint>
#include <cmath>

namespace pl {

// SplitMix64 step: seed derivation and keyed mixing.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix2(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ b);
}

inline std::uint64_t mix3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return splitmix64(mix2(a, b) ^ c);
}

// xoshiro256** by Blackman/Vigna; public-domain reference algorithm.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) {
            x = splitmix64(x);
            w = x;
        }
    }

    std::uint64_t next() {
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

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log() argument.
    double uniform01_open0() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

    std::uint64_t bounded(std::uint64_t n) { return next() % n; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// Standard normal stream via Box-Muller. std::normal_distribution is
// implementation-defined, which would break byte-identical reproducibility.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.uniform01_open0();
        const double u2 = rng_.uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Xoshiro256& raw() { return rng_; }

private:
    Xoshiro256 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stateless keyed draws (pseudorandom functions of the key).
inline double prf_uniform(std::uint64_t key) {
    return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

inline int prf_bit(std::uint64_t key) {
    return static_cast<int>(splitmix64(key) >> 63);
}

}  // namespace pl
