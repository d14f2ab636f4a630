#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace sigfield {

/// SplitMix64 step; used only to expand keys into generator state.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256pp(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Independent generator for (seed, stream, index). Streams separate estimators
/// that share a seed; index is the replica number.
Xoshiro256pp make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept;

/// Stable 64-bit key derived from a label, for naming streams.
std::uint64_t stream_key(const char* label) noexcept;

}  // namespace sigfield
