#pragma once

#include "prioritymac/metrics.hpp"
#include "prioritymac/radio_channel.hpp"
#include "prioritymac/sim_kernel.hpp"
#include "prioritymac/traffic.hpp"

#include <array>
#include <deque>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace pmac {

enum class NodeRole : std::uint8_t { SinkController, Sensor };

/// Two FIFO queues per node, one per class, each with its own capacity.
/// Urgent packets are always served before normal ones.
class TxQueue {
public:
    explicit TxQueue(std::size_t capacity_per_class = 10) : capacity_(capacity_per_class) {}

    /// False when the class queue is full; the caller drops the packet.
    bool push(PriorityClass cls, PacketId id);
    std::optional<PacketId> front(PriorityClass cls) const;
    void pop(PriorityClass cls);
    /// Removes `id` wherever it sits.
    bool erase(PacketId id);

    bool empty(PriorityClass cls) const { return q_[index_of(cls)].empty(); }
    bool empty() const { return empty(PriorityClass::Urgent) && empty(PriorityClass::Normal); }
    std::size_t size(PriorityClass cls) const { return q_[index_of(cls)].size(); }
    std::size_t capacity() const { return capacity_; }
    bool contains(PacketId id) const;

    /// Next packet by class priority.
    std::optional<std::pair<PriorityClass, PacketId>> next() const;

    const std::deque<PacketId>& items(PriorityClass cls) const { return q_[index_of(cls)]; }

private:
    std::array<std::deque<PacketId>, kClassCount> q_;
    std::size_t capacity_;
};

struct MacContext {
    Kernel& kernel;
    RadioChannel& channel;
    PacketLedger& ledger;
};

/// Contract shared by both protocols: owns the per-node queues, receives
/// packet arrivals and intact frames, and drives its own timers through the
/// kernel.
class MacProtocol : public ChannelListener {
public:
    MacProtocol(MacContext ctx, std::vector<NodeRole> roles, std::size_t queue_capacity);
    ~MacProtocol() override = default;

    virtual std::string_view name() const = 0;
    /// Called once before the kernel runs.
    virtual void start() = 0;

    /// Enqueues by class or drops with QUEUE_OVERFLOW, then notifies the
    /// protocol state machine.
    void on_packet_arrival(NodeId node, PacketId packet);

    void on_frame(NodeId receiver, const Frame& frame, SimTime at) final;

    const TxQueue& queue(NodeId node) const { return queues_.at(node); }
    NodeRole role(NodeId node) const { return roles_.at(node); }
    std::size_t node_count() const { return roles_.size(); }

protected:
    virtual void on_frame_received(NodeId node, const Frame& frame, SimTime at) = 0;
    virtual void on_enqueued(NodeId node, PriorityClass cls, PacketId packet) = 0;

    TxQueue& queue_mut(NodeId node) { return queues_.at(node); }
    /// Removes the packet from its queue and records the drop.
    void drop(NodeId node, PacketId packet, DropReason reason);
    [[noreturn]] void reject_frame(NodeId node, const Frame& frame) const;

    Kernel& kernel() { return ctx_.kernel; }
    RadioChannel& channel() { return ctx_.channel; }
    const RadioChannel& channel() const { return ctx_.channel; }
    PacketLedger& ledger() { return ctx_.ledger; }
    const PacketLedger& ledger() const { return ctx_.ledger; }
    SimTime now() const { return ctx_.kernel.now(); }

private:
    MacContext ctx_;
    std::vector<NodeRole> roles_;
    std::vector<TxQueue> queues_;
};

}  // namespace pmac
