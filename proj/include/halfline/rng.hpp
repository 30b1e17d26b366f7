#pragma once

#include <array>
#include <cstdint>

namespace halfline {

// Counter-based PRNG (Philox-4x32, 10 rounds).
//
// A stream is identified by (seed, trial, role): the 64-bit seed forms the
// key, while the trial index and a small "role" tag (0 = user positions,
// 1 = server positions, 2 = server capacities, ...) occupy the two high
// counter words.  The two low counter words enumerate blocks within the
// stream.  Streams are therefore statistically independent, and trials can
// be generated in any order -- or concurrently -- with identical results.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint32_t trial, std::uint32_t role)
        : key_{static_cast<std::uint32_t>(seed & 0xffffffffULL),
               static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0u, 0u, trial, role} {}

    std::uint32_t next_u32() {
        if (idx_ == 4) refill();
        return out_[idx_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        const std::uint64_t lo = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform in [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // One keyed block; exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> x,
                                              std::array<std::uint32_t, 2> k) {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                k[0] += kW0;
                k[1] += kW1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * x[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * x[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
        }
        return x;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    void refill() {
        out_ = block(ctr_, key_);
        idx_ = 0;
        if (++ctr_[0] == 0u) ++ctr_[1];  // 64-bit block index, low word first
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> out_{};
    int idx_ = 4;
};

}  // namespace halfline
