#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11 constants).
// Each stream is keyed by a 64-bit seed plus a 64-bit stream id, so parallel
// sampling with per-configuration streams is reproducible by construction.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace bdpp {

class PhiloxRng {
  public:
    PhiloxRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    std::uint32_t next_u32() {
        if (have_ == 0) {
            block_ = philox(ctr_, key_);
            advance_counter();
            have_ = 4;
        }
        return block_[4 - have_--];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform in (0,1), never exactly 0 or 1.
    double uniform() {
        return (next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    double normal() {
        if (have_gauss_) {
            have_gauss_ = false;
            return gauss_;
        }
        const double u = uniform(), v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925 * v;
        gauss_ = r * std::sin(a);
        have_gauss_ = true;
        return r * std::cos(a);
    }

    // Standard complex Gaussian: E|a|^2 = 1.
    std::complex<double> complex_normal() {
        const double u = uniform(), v = uniform();
        const double r = std::sqrt(-std::log(u));
        const double a = 6.283185307179586476925 * v;
        return {r * std::cos(a), r * std::sin(a)};
    }

  private:
    using u32 = std::uint32_t;
    using Block = std::array<u32, 4>;
    using Key = std::array<u32, 2>;

    static u32 mulhi(u32 a, u32 b) {
        return static_cast<u32>((static_cast<std::uint64_t>(a) * b) >> 32);
    }

    static Block philox(Block ctr, Key key) {
        constexpr u32 kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
        constexpr u32 kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const u32 hi0 = mulhi(kM0, ctr[0]), lo0 = kM0 * ctr[0];
            const u32 hi1 = mulhi(kM1, ctr[2]), lo1 = kM1 * ctr[2];
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kW0;
            key[1] += kW1;
        }
        return ctr;
    }

    void advance_counter() {
        if (++ctr_[0] == 0) ++ctr_[1];
    }

    Key key_;
    Block ctr_;
    Block block_{};
    int have_ = 0;
    bool have_gauss_ = false;
    double gauss_ = 0.0;
};

}  // namespace bdpp
