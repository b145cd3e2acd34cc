#pragma once

#include <cmath>
#include <cstdint>

namespace fpimpulse {

// SplitMix64 (Steele, Lea, Flood); used only to expand seeds.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t s) : state(s) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ (Blackman & Vigna). Substream k is derived from (seed, k) by
// offsetting the SplitMix64 seeding sequence with a Weyl increment, so path
// ensembles are reproducible independently of thread scheduling.
class Xoshiro256pp {
public:
    Xoshiro256pp(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 sm(seed);
        std::uint64_t base = sm.next();
        SplitMix64 sub(base + stream * 0x9E3779B97F4A7C15ULL);
        for (auto& w : s_) w = sub.next();
        // All-zero state is invalid for xoshiro; sub.next() cannot return four
        // zeros in a row for any input, but guard anyway.
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[3] = 0x9E3779B97F4A7C15ULL;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

// Standard normal draws by the Marsaglia polar method, one substream per
// consumer. The spare value is cached, so draws come in deterministic order.
class GaussianSampler {
public:
    GaussianSampler(std::uint64_t seed, std::uint64_t stream)
        : rng_(seed, stream) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double v1, v2, s;
        do {
            v1 = 2.0 * rng_.next_unit() - 1.0;
            v2 = 2.0 * rng_.next_unit() - 1.0;
            s = v1 * v1 + v2 * v2;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v2 * f;
        has_spare_ = true;
        return v1 * f;
    }

private:
    Xoshiro256pp rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace fpimpulse
