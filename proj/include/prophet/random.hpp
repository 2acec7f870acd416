#pragma once

// Counter-based random streams.
//
// Every stream is a pure function of (seed, stream index, purpose tag): the
// Philox4x32-10 block cipher is keyed with the seed and encrypts a counter
// that packs the block number, the purpose tag and the stream index. No state
// is shared between streams, so any partition of trials over threads yields
// the same draws.

#include <array>
#include <cstdint>

namespace prophet {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
Philox4x32Counter philox4x32_10(Philox4x32Counter counter, Philox4x32Key key) noexcept;

/// Substream purposes used by the evaluator. Any 16-bit tag is valid.
enum class StreamPurpose : std::uint16_t {
    Samples = 0,
    Values = 1,
    RuleRandomness = 2,
    Auxiliary = 3,
};

class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t stream_index,
                  std::uint16_t purpose = 0) noexcept;
    CounterStream(std::uint64_t seed, std::uint64_t stream_index, StreamPurpose purpose) noexcept
        : CounterStream(seed, stream_index, static_cast<std::uint16_t>(purpose)) {}

    std::uint64_t next_u64() noexcept;

    /// 53-bit uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// 53-bit uniform on (0, 1]; safe to pass to log().
    double uniform_positive() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Integer in [0, bound) from one 64-bit draw (multiply-high reduction).
    std::uint64_t below(std::uint64_t bound) noexcept;

    std::uint64_t blocks_consumed() const noexcept { return block_; }

private:
    void refill() noexcept;

    Philox4x32Key key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint16_t purpose_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
};

} // namespace prophet
