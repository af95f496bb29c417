#pragma once

// Counter-based random number generation. Every stochastic component of the
// library draws from a Philox4x32-10 stream addressed by
// (master seed, purpose, replicate, field), so replicates and fields can be
// generated in any order, or in parallel, with identical results.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace permacox {

// Philox4x32-10 (Salmon, Moraes, Dror, Shaw; SC'11). The key is the 64-bit
// master seed, the high counter words select the stream, the low words count
// generated blocks within the stream.
class Philox4x32 {
public:
    using result_type = std::uint32_t;

    Philox4x32() : Philox4x32(0, 0) {}
    Philox4x32(std::uint64_t key, std::uint64_t stream) {
        key_ = {static_cast<std::uint32_t>(key),
                static_cast<std::uint32_t>(key >> 32)};
        ctr_ = {0u, 0u,
                static_cast<std::uint32_t>(stream),
                static_cast<std::uint32_t>(stream >> 32)};
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return 0xffffffffu; }

    result_type operator()() {
        if (idx_ == 4) {
            block_ = run_rounds(ctr_, key_);
            next_block();
            idx_ = 0;
        }
        return block_[idx_++];
    }

    // One keyed block, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> run_rounds(std::array<std::uint32_t, 4> ctr,
                                                   std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t(0xD2511F53u) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    void next_block() {
        if (++ctr_[0] == 0) ++ctr_[1];  // 64-bit block counter; stream words fixed
    }

    std::array<std::uint32_t, 2> key_{};
    std::array<std::uint32_t, 4> ctr_{};
    std::array<std::uint32_t, 4> block_{};
    int idx_ = 4;
};

// Stream address layout: purpose(8) | field(16) | replicate(40).
enum class Stream : std::uint8_t {
    field_noise = 1,   // Gaussian field draws, keyed by (replicate, field)
    counts = 2,        // conditional Poisson counts, keyed by replicate
    placement = 3,     // within-cell point placement, keyed by replicate
    pair_thinning = 4, // covariance-curve pair subsampling
    generic = 5,
};

inline Philox4x32 make_stream(std::uint64_t master_seed, Stream purpose,
                              std::uint64_t replicate = 0, std::uint32_t field = 0) {
    const std::uint64_t sid = (std::uint64_t(purpose) << 56)
        | (std::uint64_t(field & 0xffffu) << 40)
        | (replicate & 0xffffffffffULL);
    return Philox4x32(master_seed, sid);
}

// Uniform on [0,1) with 53 random bits.
inline double uniform01(Philox4x32& eng) {
    const std::uint64_t hi = eng() >> 5;  // 27 bits
    const std::uint64_t lo = eng() >> 6;  // 26 bits
    return double((hi << 26) | lo) * 0x1.0p-53;
}

// Uniform on (0,1]; safe under log().
inline double uniform_pos(Philox4x32& eng) {
    const std::uint64_t hi = eng() >> 5;
    const std::uint64_t lo = eng() >> 6;
    return double(((hi << 26) | lo) + 1) * 0x1.0p-53;
}

// Standard normal variates via Box-Muller, pairwise cached.
class GaussianStream {
public:
    explicit GaussianStream(Philox4x32 eng) : eng_(eng) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos(eng_);
        const double u2 = uniform01(eng_);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    Philox4x32 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Poisson variate. Multiplicative inversion for small means, Hormann's PTRS
// transformed rejection for large ones.
inline std::uint32_t poisson_draw(Philox4x32& eng, double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw std::invalid_argument("poisson_draw: mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        const double limit = std::exp(-mean);
        std::uint32_t k = 0;
        double prod = uniform_pos(eng);
        while (prod > limit) {
            ++k;
            prod *= uniform_pos(eng);
        }
        return k;
    }
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        const double u = uniform01(eng) - 0.5;
        const double v = uniform_pos(eng);
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint32_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b))
            <= k * log_mean - mean - std::lgamma(k + 1.0))
            return static_cast<std::uint32_t>(k);
    }
}

}  // namespace permacox
