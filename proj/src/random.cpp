#include "prophet/random.hpp"

namespace prophet {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

} // namespace

Philox4x32Counter philox4x32_10(Philox4x32Counter c, Philox4x32Key k) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kMul0, c[0], lo0, hi0);
        mulhilo(kMul1, c[2], lo1, hi1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t stream_index,
                             std::uint16_t purpose) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_lo_(static_cast<std::uint32_t>(stream_index)),
      stream_hi_(static_cast<std::uint32_t>(stream_index >> 32)),
      purpose_(purpose) {}

void CounterStream::refill() noexcept {
    // 48-bit block counter, 16-bit purpose, 64-bit stream index.
    const Philox4x32Counter ctr{
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>((block_ >> 32) & 0xFFFFu) |
            (static_cast<std::uint32_t>(purpose_) << 16),
        stream_lo_,
        stream_hi_,
    };
    const auto out = philox4x32_10(ctr, key_);
    ++block_;
    buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    buffered_ = 2;
}

std::uint64_t CounterStream::next_u64() noexcept {
    if (buffered_ == 0) refill();
    return buffer_[2 - buffered_--];
}

std::uint64_t CounterStream::below(std::uint64_t bound) noexcept {
    const unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
}

} // namespace prophet
