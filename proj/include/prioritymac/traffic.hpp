#pragma once

#include "prioritymac/rng.hpp"
#include "prioritymac/types.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace pmac {

enum class PriorityClass : std::uint8_t { Urgent, Normal };
inline constexpr std::size_t kClassCount = 2;

constexpr std::size_t index_of(PriorityClass c) { return static_cast<std::size_t>(c); }
std::string_view to_string(PriorityClass c);

enum class DropReason : std::uint8_t { DeadlineExpired, RetryLimit, QueueOverflow };
std::string_view to_string(DropReason r);

struct Packet {
    PacketId id = 0;
    PriorityClass cls = PriorityClass::Normal;
    NodeId src = 0;
    std::uint32_t length_bytes = 34;
    SimTime generated_at = 0;
    std::optional<SimTime> deadline_at;
    std::optional<SimTime> delivered_at;
    std::optional<DropReason> drop_reason;
    std::optional<SimTime> dropped_at;

    bool finalized() const { return delivered_at.has_value() || drop_reason.has_value(); }
};

struct TrafficSpec {
    PriorityClass cls = PriorityClass::Normal;
    Duration interval = 10 * kSecond;
    Duration phase = 0;
};

struct PacketDefaults {
    std::uint32_t length_bytes = 34;
    Duration urgent_deadline = 100 * kMillisecond;
};

/// Periodic arrivals phase, phase + interval, ... strictly below horizon.
std::vector<SimTime> arrivals(const TrafficSpec& spec, SimTime horizon);

/// TrafficSpec with a phase drawn uniformly from [0, interval).
TrafficSpec draw_traffic_spec(PriorityClass cls, Duration interval, RngStream& rng);

/// Packet with class defaults; the id is left for the ledger to assign.
Packet make_packet(const TrafficSpec& spec, NodeId src, SimTime at, const PacketDefaults& defaults = {});

}  // namespace pmac
