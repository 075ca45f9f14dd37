#include "prioritymac/traffic.hpp"

namespace pmac {

std::string_view to_string(PriorityClass c) {
    return c == PriorityClass::Urgent ? "urgent" : "normal";
}

std::string_view to_string(DropReason r) {
    switch (r) {
        case DropReason::DeadlineExpired: return "deadline_expired";
        case DropReason::RetryLimit: return "retry_limit";
        case DropReason::QueueOverflow: return "queue_overflow";
    }
    return "unknown";
}

std::vector<SimTime> arrivals(const TrafficSpec& spec, SimTime horizon) {
    if (spec.interval == 0) {
        throw ConfigError("traffic interval must be positive");
    }
    std::vector<SimTime> out;
    if (spec.phase >= horizon) {
        return out;
    }
    out.reserve((horizon - spec.phase) / spec.interval + 1);
    for (SimTime t = spec.phase; t < horizon; t += spec.interval) {
        out.push_back(t);
    }
    return out;
}

TrafficSpec draw_traffic_spec(PriorityClass cls, Duration interval, RngStream& rng) {
    if (interval == 0) {
        throw ConfigError("traffic interval must be positive");
    }
    return TrafficSpec{cls, interval, rng.uniform(interval)};
}

Packet make_packet(const TrafficSpec& spec, NodeId src, SimTime at, const PacketDefaults& defaults) {
    Packet p;
    p.cls = spec.cls;
    p.src = src;
    p.length_bytes = defaults.length_bytes;
    p.generated_at = at;
    if (spec.cls == PriorityClass::Urgent) {
        p.deadline_at = at + defaults.urgent_deadline;
    }
    return p;
}

}  // namespace pmac
