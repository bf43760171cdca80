#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace vmimo::numerics {

/// Counter-based random stream (Philox4x32-10).
///
/// The key is the 64-bit seed and the stream id occupies the upper half of
/// the 128-bit counter, so streams with different ids walk disjoint counter
/// ranges and never overlap. One stream per replicate; never share one
/// across threads.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next_u64(); }
    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal (Box-Muller, second variate cached).
    double normal();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;  // 32-bit words consumed from block_
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace vmimo::numerics
