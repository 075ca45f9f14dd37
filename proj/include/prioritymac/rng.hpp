#pragma once

#include <array>
#include <cstdint>

namespace pmac {

/// Reproducible random stream: xoshiro256** whose 256-bit state is filled
/// from splitmix64 applied to (seed, stream id). The same pair yields the
/// same sequence on every platform.
///
///   splitmix64(x): x += 0x9E3779B97F4A7C15;
///                  z = x; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
///                  z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
///                  return z ^ (z >> 31);
///   xoshiro256**:  result = rotl(s1 * 5, 7) * 9; t = s1 << 17;
///                  s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t;
///                  s3 = rotl(s3, 45);
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next();

    /// Uniform integer in [0, bound); bound must be non-zero.
    std::uint64_t uniform(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform01();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

private:
    std::array<std::uint64_t, 4> state_{};
    std::uint64_t seed_;
    std::uint64_t stream_;
};

/// One independent stream per (node, purpose).
enum class StreamPurpose : std::uint64_t { TrafficPhase = 0, Backoff = 1, Misc = 2 };

constexpr std::uint64_t stream_id(std::uint32_t node, StreamPurpose purpose) {
    return (static_cast<std::uint64_t>(node) << 8) | static_cast<std::uint64_t>(purpose);
}

}  // namespace pmac
