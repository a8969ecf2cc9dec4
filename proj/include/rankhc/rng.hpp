#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rankhc {

// Counter-based splittable RNG built on the splitmix64 finalizer.
// Streams are derived by mixing a root seed with up to three stream keys,
// so any (seed, key...) pair names the same stream regardless of thread
// scheduling. That makes null tables bit-reproducible from (seed, n, t).
inline constexpr std::uint64_t kSplitmixGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b) {
    return splitmix_finalize(a + kSplitmixGamma * (b + 1));
}

struct RngSeed {
    std::uint64_t value = 0;
};

class Rng {
public:
    explicit Rng(std::uint64_t state) : state_(state) {}

    static Rng derive(RngSeed seed, std::uint64_t k1, std::uint64_t k2 = 0,
                      std::uint64_t k3 = 0) {
        std::uint64_t s = splitmix_finalize(seed.value ^ 0x9D1B2F6C34A5E7ULL);
        s = mix_keys(s, k1);
        s = mix_keys(s, k2);
        s = mix_keys(s, k3);
        return Rng(s);
    }

    std::uint64_t next_u64() {
        state_ += kSplitmixGamma;
        return splitmix_finalize(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1); avoids 0 for log/tan transforms.
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    double exponential(double rate) {
        return -std::log(uniform_pos()) / rate;
    }

    double cauchy(double location, double scale) {
        return location +
               scale * std::tan(std::numbers::pi * (uniform_pos() - 0.5));
    }

private:
    std::uint64_t state_;
};

}  // namespace rankhc
