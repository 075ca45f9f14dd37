#include "prioritymac/scenario.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <string>

namespace pmac {

void validate(const Scenario& s) {
    const std::uint32_t sensors = s.total_nodes > 0 ? s.total_nodes - 1 : 0;
    if (s.total_nodes < 2) {
        throw ValidationError("total_nodes", "need a sink and at least one sensor");
    }
    if (s.n_urgent > sensors) {
        throw ValidationError("urgent_nodes", "at most " + std::to_string(sensors) + " sensors exist, got " +
                                                  std::to_string(s.n_urgent));
    }
    if (s.n_urgent + s.n_normal_only > sensors) {
        throw ValidationError("normal_only_nodes", "urgent_nodes + normal_only_nodes exceeds the " +
                                                       std::to_string(sensors) + " sensors");
    }
    if (s.duration == 0) {
        throw ValidationError("duration_s", "must be positive");
    }
    if (s.traffic.urgent_interval == 0) {
        throw ValidationError("urgent_interval_s", "must be positive");
    }
    if (s.traffic.normal_interval == 0) {
        throw ValidationError("normal_interval_s", "must be positive");
    }
    if (s.traffic.urgent_deadline == 0) {
        throw ValidationError("urgent_deadline_us", "must be positive");
    }
    if (s.traffic.packet_length < 2) {
        throw ValidationError("packet_length", "must be at least 2 bytes");
    }
    if (s.traffic.queue_capacity == 0) {
        throw ValidationError("queue_capacity", "must be positive");
    }
    if (s.channel.byte_time == 0) {
        throw ValidationError("byte_time_us", "must be positive");
    }
    if (s.channel.propagation_delay != 0) {
        throw ValidationError("propagation_delay_us", "only a zero-delay star is modeled");
    }
    if (s.frames.control == 0) {
        throw ValidationError("control_bytes", "must be positive");
    }
    if (s.frog.frag_size < 2 || s.frog.frag_size > s.traffic.packet_length) {
        throw ValidationError("frag_size", "must lie in [2, " + std::to_string(s.traffic.packet_length) + "], got " +
                                               std::to_string(s.frog.frag_size));
    }
    const Duration preempt = s.frog.ifs_urgent + (s.frog.cw_min > 0 ? s.frog.cw_min - 1 : 0) * s.frog.backoff_slot;
    if (s.frog.gap_frag <= preempt) {
        throw ValidationError("gap_frag_us", "must exceed ifs_urgent + (cw_min-1) x backoff_slot = " +
                                                 std::to_string(preempt) + " us, got " + std::to_string(s.frog.gap_frag));
    }
    try {
        s.frog.validate(s.traffic.packet_length);
    } catch (const ConfigError& e) {
        throw ValidationError("frogmac", e.what());
    }
    const Duration ctl = s.frames.control * s.channel.byte_time;
    const Duration data = s.traffic.packet_length * s.channel.byte_time;
    if (s.superframe.eis < ctl) {
        throw ValidationError("eis_us", "shorter than an EIS indication (" + std::to_string(ctl) + " us)");
    }
    if (s.superframe.rrp_subslot < ctl) {
        throw ValidationError("rrp_subslot_us", "shorter than a reservation request (" + std::to_string(ctl) + " us)");
    }
    if (s.superframe.nc_slot < data + s.superframe.sifs + ctl) {
        throw ValidationError("nc_slot_us", "cannot hold DATA + SIFS + ACK (" +
                                                std::to_string(data + s.superframe.sifs + ctl) + " us)");
    }
    if (s.frog.ack_timeout <= s.frog.sifs + ctl) {
        throw ValidationError("ack_timeout_us", "must exceed SIFS + control frame airtime");
    }
}

NodeLayout layout_for(const Scenario& s) {
    NodeLayout layout;
    layout.roles.assign(s.total_nodes, NodeRole::Sensor);
    layout.roles[kSinkId] = NodeRole::SinkController;
    for (NodeId n = 1; n <= s.n_urgent; ++n) {
        layout.urgent_nodes.push_back(n);
        if (s.urgent_sends_normal) {
            layout.normal_nodes.push_back(n);
        }
    }
    for (NodeId n = s.n_urgent + 1; n <= s.n_urgent + s.n_normal_only; ++n) {
        layout.normal_nodes.push_back(n);
    }
    return layout;
}

std::string default_scenario_id(const Scenario& s) {
    return std::string(to_string(s.protocol)) + "-u" + std::to_string(s.n_urgent) + "-f" +
           std::to_string(s.frog.frag_size);
}

bool check_conservation(const PacketLedger& ledger, const MacProtocol& mac) {
    // (node, class) -> generated, closed, queued-open
    std::map<std::pair<NodeId, PriorityClass>, std::array<std::uint64_t, 3>> tally;
    for (const Packet& p : ledger.packets()) {
        auto& t = tally[{p.src, p.cls}];
        ++t[0];
        if (p.finalized()) {
            ++t[1];
        } else if (mac.queue(p.src).contains(p.id)) {
            ++t[2];
        }
    }
    for (const auto& [key, t] : tally) {
        if (t[0] != t[1] + t[2]) {
            return false;
        }
    }
    return true;
}

RunOutput run_scenario(const Scenario& scenario, std::uint64_t seed, std::ostream* trace) {
    validate(scenario);
    const NodeLayout layout = layout_for(scenario);

    Kernel kernel;
    kernel.set_trace(trace);
    RadioChannel channel(kernel, scenario.channel);
    PacketLedger ledger;
    MacContext ctx{kernel, channel, ledger};

    std::unique_ptr<MacProtocol> mac;
    SsMac* ss = nullptr;
    FrogMac* frog = nullptr;
    if (scenario.protocol == Protocol::SsMac) {
        SuperframeConfig timing = scenario.superframe;
        timing.data_bytes = scenario.traffic.packet_length;
        auto p = std::make_unique<SsMac>(ctx, layout.roles, scenario.traffic.queue_capacity, timing, scenario.frames,
                                         SsMac::Layout{layout.normal_nodes, layout.urgent_nodes});
        ss = p.get();
        mac = std::move(p);
    } else {
        auto p = std::make_unique<FrogMac>(ctx, layout.roles, scenario.traffic.queue_capacity, scenario.frog,
                                           scenario.frames, seed);
        frog = p.get();
        mac = std::move(p);
    }
    std::vector<NodeId> all(scenario.total_nodes);
    for (NodeId n = 0; n < all.size(); ++n) {
        all[n] = n;
    }
    channel.attach(mac.get(), all);

    const PacketDefaults defaults{scenario.traffic.packet_length, scenario.traffic.urgent_deadline};
    auto schedule_class = [&](NodeId node, const TrafficSpec& spec) {
        for (SimTime t : arrivals(spec, scenario.duration)) {
            kernel.schedule(t, node, EventKind::Arrival, [&, node, spec, t] {
                const PacketId id = ledger.add(make_packet(spec, node, t, defaults));
                mac->on_packet_arrival(node, id);
            });
        }
    };
    for (NodeId node = 1; node < scenario.total_nodes; ++node) {
        RngStream rng(seed, stream_id(node, StreamPurpose::TrafficPhase));
        const TrafficSpec urgent = draw_traffic_spec(PriorityClass::Urgent, scenario.traffic.urgent_interval, rng);
        const TrafficSpec normal = draw_traffic_spec(PriorityClass::Normal, scenario.traffic.normal_interval, rng);
        const bool sends_urgent = node <= scenario.n_urgent;
        const bool sends_normal = std::find(layout.normal_nodes.begin(), layout.normal_nodes.end(), node) !=
                                  layout.normal_nodes.end();
        if (sends_urgent) {
            schedule_class(node, urgent);
        }
        if (sends_normal) {
            schedule_class(node, normal);
        }
    }

    mac->start();
    RunOutput out;
    out.events = kernel.run_until(scenario.duration);
    out.channel = channel.stats();
    if (ss != nullptr) {
        out.ss = ss->stats();
    }
    if (frog != nullptr) {
        out.frog = frog->stats();
    }
    out.conserved = check_conservation(ledger, *mac);
    ScenarioKey key{scenario.id.empty() ? default_scenario_id(scenario) : scenario.id, scenario.protocol,
                    scenario.n_urgent, scenario.frog.frag_size, seed};
    out.result = aggregate(ledger.packets(), std::move(key));
    out.packets.assign(ledger.packets().begin(), ledger.packets().end());
    return out;
}

}  // namespace pmac
