#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace mixcop {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A generator is identified by (seed, stream): the seed is the 64-bit key
/// and the stream occupies the upper two counter words, so distinct streams
/// never share a counter block. Satisfies UniformRandomBitGenerator.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    /// Ten-round bijection of one counter block under a key.
    static Block block(Block counter, Key key);

private:
    Key key_;
    Block counter_;
    Block buffer_{};
    int used_ = 4;
};

/// Stream id for replicate `rep` of grid point `point`; keeps the two indices
/// in separate 32-bit halves.
inline std::uint64_t stream_id(std::uint32_t point, std::uint32_t rep) {
    return (static_cast<std::uint64_t>(point) << 32) | rep;
}

}  // namespace mixcop
