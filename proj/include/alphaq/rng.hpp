#pragma once

// Counter-based random number generation (Philox4x32-10). Every stream is
// addressed by (seed, stream_id), so replications and simulation components
// can draw independently of execution order and thread count, and a panel
// regenerates bit-exactly from its provenance.

#include <array>
#include <cmath>
#include <cstdint>

namespace alphaq {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t m0 = 0xD2511F53ULL * ctr[0];
    const std::uint64_t m1 = 0xCD9E8D57ULL * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(m0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(m0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(m1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(m1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
}

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::uint32_t k0, std::uint32_t k1) {
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, k0, k1);
        k0 += 0x9E3779B9u;
        k1 += 0xBB67AE85u;
    }
    return ctr;
}

} // namespace detail

// One independent substream of the keyed Philox generator. 2^64 streams per
// seed, 2^64 blocks of four 32-bit words per stream.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          stream_lo_(static_cast<std::uint32_t>(stream_id)),
          stream_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

    std::uint32_t next_u32() {
        if (block_pos_ == 4) {
            block_ = detail::philox4x32_10({static_cast<std::uint32_t>(counter_),
                                            static_cast<std::uint32_t>(counter_ >> 32),
                                            stream_lo_, stream_hi_},
                                           key0_, key1_);
            ++counter_;
            block_pos_ = 0;
        }
        return block_[block_pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Modulo bias is negligible for the n used
    // here (n <= a few thousand against a 64-bit draw).
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    // Standard normal via Box-Muller; the second variate of each pair is
    // cached so draws come in a fixed, reproducible sequence.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 6.283185307179586476925286766559 * uniform();
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    double exponential() { return -std::log(uniform()); }

    double chi_squared_2() { return -2.0 * std::log(uniform()); }

    // Chi-squared with even degrees of freedom v: 2 * Gamma(v/2, 1) via a
    // product of v/2 uniforms under a single log. The product of at most a
    // few dozen uniforms stays far above the double underflow threshold.
    double chi_squared_even(int v) {
        double prod = 1.0;
        for (int k = 0; k < v / 2; ++k) prod *= uniform();
        return -2.0 * std::log(prod);
    }

    // Student t with even degrees of freedom v.
    double student_t_even(int v) {
        return normal() / std::sqrt(chi_squared_even(v) / static_cast<double>(v));
    }

    // Student t8 scaled to unit variance (divided by sqrt(8/6)).
    double standardized_t8() {
        return student_t_even(8) / 1.1547005383792515;
    }

private:
    std::uint32_t key0_, key1_;
    std::uint32_t stream_lo_, stream_hi_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int block_pos_ = 4;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Collision-free stream id for (cell, replication) addressing.
inline std::uint64_t stream_id(std::uint32_t cell, std::uint32_t replication) {
    return (static_cast<std::uint64_t>(cell) << 32) | replication;
}

} // namespace alphaq
