#pragma once

// Counter-based random number generation (Philox4x32-10) plus the variate
// transforms used throughout the library. Streams are cheap value types:
// a (seed, stream_id) pair fully determines the sequence, so independent
// substreams can be handed to worker threads without coordination.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gctail {

struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    // One 10-round block: 128-bit counter + 64-bit key -> 128 random bits.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream_id) {}

    std::uint32_t next_u32() {
        if (idx_ == 4) {
            buf_ = Philox4x32::block({static_cast<std::uint32_t>(block_),
                                      static_cast<std::uint32_t>(block_ >> 32),
                                      static_cast<std::uint32_t>(stream_),
                                      static_cast<std::uint32_t>(stream_ >> 32)},
                                     key_);
            ++block_;
            idx_ = 0;
        }
        return buf_[idx_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on (0,1): ((x >> 11) + 0.5) * 2^-53 — never exactly 0 or 1.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // Exponential with the given rate (mean 1/rate).
    double exponential(double rate) { return -std::log(uniform01()) / rate; }

    // Double exponential centered at `center` with the given rate.
    double laplace(double center, double rate) {
        const double u = uniform01() - 0.5;
        const double s = (u < 0.0) ? -1.0 : 1.0;
        return center - s * std::log1p(-2.0 * std::fabs(u)) / rate;
    }

    // Categorical draw from cumulative-free weights (must sum to ~1).
    template <class Vec>
    std::size_t categorical(const Vec& probs) {
        const double u = uniform01();
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
            acc += probs[k];
            if (u < acc) return k;
        }
        return probs.size() - 1;
    }

  private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int idx_ = 4;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

// Stream-id layout shared by all experiment drivers: one stream per
// (result row, batch) pair so batches replay identically under any thread
// count.
inline std::uint64_t stream_id_for(std::uint64_t row_index, std::uint64_t batch) {
    return (row_index << 20) + batch;
}

}  // namespace gctail
