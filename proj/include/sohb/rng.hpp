#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include <boost/random/normal_distribution.hpp>

namespace sohb {

/// Philox4x32-10 block cipher (Salmon et al., SC'11). Stateless: maps a
/// (key, counter) pair to four 32-bit words.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }
};

/// A reproducible random stream addressed by (seed, stream, substream).
///
/// The seed is the Philox key; stream and substream occupy the upper three
/// counter words, and the low word counts 128-bit blocks inside the
/// substream. Streams with different addresses never overlap, so particle n
/// at step k can draw from `CounterRng(seed, n, k)` in any order or thread.
class CounterRng {
public:
    using result_type = std::uint32_t;
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return 0xFFFFFFFFu; }

    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0u, substream, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    result_type operator()() noexcept { return next_u32(); }

    std::uint32_t next_u32() noexcept {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform on (0, 1), 53-bit resolution; never returns 0 or 1.
    double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal (ziggurat); consumes a variable number of words.
    double normal() { return boost::random::normal_distribution<double>{}(*this); }

    /// Exponential of rate 1.
    double exponential() noexcept { return -std::log(uniform()); }

    /// Number of 128-bit blocks consumed so far.
    std::uint32_t blocks_used() const noexcept { return ctr_[0]; }

private:
    void refill() noexcept {
        buf_ = Philox4x32::generate(ctr_, key_);
        ++ctr_[0];
        pos_ = 0;
    }

    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    Philox4x32::Counter buf_{};
    int pos_ = 4;
};

/// Stream-id namespaces so that different uses of one seed never collide.
namespace rng_stream {
inline constexpr std::uint64_t orientation_noise = 0;           // + particle index
inline constexpr std::uint64_t initial_positions = 1ull << 40;  // + particle index
inline constexpr std::uint64_t initial_orientations = 2ull << 40;
inline constexpr std::uint64_t replica = 3ull << 40;            // + replica index
inline constexpr std::uint64_t misc = 4ull << 40;
}  // namespace rng_stream

}  // namespace sohb
