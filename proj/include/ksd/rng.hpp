#pragma once

// Counter-based random streams (Philox4x32-10). Every draw is a pure
// function of (master_seed, path_index, step, substream), so path
// generation is reproducible regardless of thread count or scheduling.

#include <array>
#include <cmath>
#include <cstdint>

namespace ksd {

namespace philox {

inline constexpr std::uint32_t kMulA = 0xD2511F53u;
inline constexpr std::uint32_t kMulB = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeylA = 0x9E3779B9u;
inline constexpr std::uint32_t kWeylB = 0xBB67AE85u;

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Block round_once(const Block& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline Block block10(Block c, Key k) {
    for (int r = 0; r < 9; ++r) {
        c = round_once(c, k);
        k[0] += kWeylA;
        k[1] += kWeylB;
    }
    return round_once(c, k);
}

} // namespace philox

/// Substream roles within one step of one path.
enum class Sub : std::uint32_t { gauss = 0, flag = 1, aux = 2 };

/// One independent stream per (master_seed, path_index). Value type; cheap
/// to copy. Draws are addressed by (step, substream) rather than consumed
/// from mutable state.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t path_index)
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)},
          path_lo_(static_cast<std::uint32_t>(path_index)),
          path_hi_(static_cast<std::uint32_t>(path_index >> 32)) {}

    std::uint64_t raw64(std::uint64_t step, Sub sub) const {
        const philox::Block c{path_lo_, path_hi_,
                              static_cast<std::uint32_t>(step),
                              (static_cast<std::uint32_t>(step >> 32) << 8) |
                                  static_cast<std::uint32_t>(sub)};
        const philox::Block out = philox::block10(c, key_);
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    /// Uniform on [0,1), 53-bit resolution.
    double uniform(std::uint64_t step, Sub sub = Sub::flag) const {
        return static_cast<double>(raw64(step, sub) >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller on the full 128-bit block. The block
    /// yields a (cos, sin) pair; consecutive steps share one block, with a
    /// one-entry memo to avoid recomputing it on sequential access.
    double normal(std::uint64_t step, Sub sub = Sub::gauss) const {
        const std::uint64_t blk = step >> 1;
        if (!memo_valid_ || memo_blk_ != blk || memo_sub_ != sub) {
            const philox::Block c{path_lo_, path_hi_,
                                  static_cast<std::uint32_t>(blk),
                                  0x80000000u |
                                      (static_cast<std::uint32_t>(blk >> 32) << 8) |
                                      static_cast<std::uint32_t>(sub)};
            const philox::Block out = philox::block10(c, key_);
            const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
            const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
            const double u1 = 1.0 - static_cast<double>(a >> 11) * 0x1.0p-53;  // (0,1]
            const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double ang = 2.0 * M_PI * u2;
            memo_pair_[0] = r * std::cos(ang);
            memo_pair_[1] = r * std::sin(ang);
            memo_blk_ = blk;
            memo_sub_ = sub;
            memo_valid_ = true;
        }
        return memo_pair_[step & 1];
    }

    std::uint64_t path_index() const {
        return (static_cast<std::uint64_t>(path_hi_) << 32) | path_lo_;
    }

private:
    philox::Key key_;
    std::uint32_t path_lo_, path_hi_;
    mutable std::uint64_t memo_blk_ = 0;
    mutable Sub memo_sub_ = Sub::gauss;
    mutable bool memo_valid_ = false;
    mutable double memo_pair_[2] = {0.0, 0.0};
};

/// Stable seed derivation for independent sub-experiments (one per
/// estimator id, oracle run, ...). splitmix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (tag + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace ksd
