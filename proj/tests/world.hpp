#pragma once

#include "prioritymac/frogmac.hpp"
#include "prioritymac/ssmac.hpp"

#include <memory>

// A star of `nodes` nodes (sink 0) with a hand-driven packet source.
struct World {
    pmac::Kernel kernel;
    pmac::RadioChannel channel{kernel, {}};
    pmac::PacketLedger ledger;
    std::vector<pmac::NodeRole> roles;

    explicit World(std::size_t nodes) : roles(nodes, pmac::NodeRole::Sensor) {
        roles[pmac::kSinkId] = pmac::NodeRole::SinkController;
        channel.record_history(true);
    }

    pmac::MacContext ctx() { return {kernel, channel, ledger}; }

    void attach(pmac::MacProtocol& mac) {
        std::vector<pmac::NodeId> all;
        for (pmac::NodeId n = 0; n < roles.size(); ++n) {
            all.push_back(n);
        }
        channel.attach(&mac, all);
    }

    /// Schedules a packet arrival; the returned handle resolves through packet().
    std::size_t inject(pmac::MacProtocol& mac, pmac::NodeId node, pmac::PriorityClass cls, pmac::SimTime at,
                          pmac::Duration deadline = 100 * pmac::kMillisecond) {
        const std::size_t handle = ids_.size();
        ids_.push_back(0);
        kernel.schedule(at, node, pmac::EventKind::Arrival, [this, &mac, node, cls, at, deadline, handle] {
            ids_[handle] = ledger.add(pmac::make_packet({cls, pmac::kSecond, 0}, node, at, {34, deadline}));
            mac.on_packet_arrival(node, ids_[handle]);
        });
        return handle;
    }

    pmac::PacketId id(std::size_t handle) const { return ids_.at(handle); }
    const pmac::Packet& packet(std::size_t handle) const { return ledger.get(ids_.at(handle)); }

    std::uint64_t collisions(pmac::FrameKind kind) const { return channel.stats().corrupted_of(kind); }

private:
    std::vector<pmac::PacketId> ids_;
};
