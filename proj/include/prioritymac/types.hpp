#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace pmac {

/// Simulated time in microseconds since the start of a run.
using SimTime = std::uint64_t;
/// A span of simulated time in microseconds.
using Duration = std::uint64_t;
using NodeId = std::uint32_t;
using PacketId = std::uint32_t;

inline constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max();
inline constexpr NodeId kChannelTarget = std::numeric_limits<NodeId>::max() - 1;
inline constexpr NodeId kSinkId = 0;

inline constexpr Duration kMillisecond = 1'000;
inline constexpr Duration kSecond = 1'000'000;

/// Raised when the simulation reaches a state the protocol logic forbids
/// (scheduling in the past, overlapping self-transmission, double
/// finalization, ...). The run is aborted.
class FatalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised for invalid scenario or protocol parameters before a run starts.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace pmac
