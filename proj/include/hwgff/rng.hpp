// Copyright 2026 The hwgff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hwgff {

/// SplitMix64 finalizer; used to fold structured keys into 64-bit seeds.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t combine_keys(std::uint64_t a, std::uint64_t b)
{
    return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

/// Counter-based Philox4x32-10 generator.
///
/// The full state is (key, counter, position in the current output block),
/// so a stream can be checkpointed exactly and independent streams are
/// obtained by changing the key alone.
class Philox4x32
{
  public:
    using result_type = std::uint32_t;

    struct State
    {
        std::uint64_t key = 0;
        std::uint64_t counter_lo = 0;
        std::uint64_t counter_hi = 0;
        std::uint32_t position = 4;
    };

    Philox4x32() = default;
    explicit Philox4x32(std::uint64_t key, std::uint64_t counter_hi = 0)
    {
        state_.key = key;
        state_.counter_hi = counter_hi;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max()
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()()
    {
        if (state_.position >= 4)
        {
            block_ = generate_block(state_.key,
                                    state_.counter_lo,
                                    state_.counter_hi);
            ++state_.counter_lo;
            state_.position = 0;
        }
        return block_[state_.position++];
    }

    /// Uniform double in the open interval (0, 1) with 53 random bits.
    double uniform()
    {
        std::uint64_t hi = (*this)();
        std::uint64_t lo = (*this)();
        std::uint64_t bits = ((hi << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    State const& state() const { return state_; }
    void set_state(State const& s)
    {
        state_ = s;
        if (state_.position < 4)
        {
            // Regenerate the block the saved position points into.
            block_ = generate_block(
                state_.key, state_.counter_lo - 1, state_.counter_hi);
        }
    }

    /// Single-block evaluation; a pure function of its arguments.
    static std::array<std::uint32_t, 4>
    generate_block(std::uint64_t key, std::uint64_t ctr_lo, std::uint64_t ctr_hi)
    {
        constexpr std::uint32_t m0 = 0xD2511F53u;
        constexpr std::uint32_t m1 = 0xCD9E8D57u;
        constexpr std::uint32_t w0 = 0x9E3779B9u;
        constexpr std::uint32_t w1 = 0xBB67AE85u;
        std::array<std::uint32_t, 4> c{static_cast<std::uint32_t>(ctr_lo),
                                       static_cast<std::uint32_t>(ctr_lo >> 32),
                                       static_cast<std::uint32_t>(ctr_hi),
                                       static_cast<std::uint32_t>(ctr_hi >> 32)};
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int round = 0; round < 10; ++round)
        {
            std::uint64_t p0 = static_cast<std::uint64_t>(m0) * c[0];
            std::uint64_t p1 = static_cast<std::uint64_t>(m1) * c[2];
            std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
            k0 += w0;
            k1 += w1;
        }
        return c;
    }

  private:
    State state_;
    std::array<std::uint32_t, 4> block_{};
};

/// Stream for (master seed, experiment id, replica id).
inline Philox4x32 make_stream(std::uint64_t master_seed,
                              std::uint64_t experiment_id,
                              std::uint64_t replica_id)
{
    return Philox4x32(combine_keys(combine_keys(master_seed, experiment_id),
                                   replica_id));
}

/// Seed for a replica derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    return combine_keys(seed, index + 0x5851f42d4c957f2dULL);
}

}  // namespace hwgff
