#include "prioritymac/mac_api.hpp"

#include <algorithm>
#include <string>

namespace pmac {

bool TxQueue::push(PriorityClass cls, PacketId id) {
    auto& q = q_[index_of(cls)];
    if (q.size() >= capacity_) {
        return false;
    }
    q.push_back(id);
    return true;
}

std::optional<PacketId> TxQueue::front(PriorityClass cls) const {
    const auto& q = q_[index_of(cls)];
    if (q.empty()) {
        return std::nullopt;
    }
    return q.front();
}

void TxQueue::pop(PriorityClass cls) {
    auto& q = q_[index_of(cls)];
    if (q.empty()) {
        throw FatalError("TxQueue::pop on an empty queue");
    }
    q.pop_front();
}

bool TxQueue::erase(PacketId id) {
    for (auto& q : q_) {
        auto it = std::find(q.begin(), q.end(), id);
        if (it != q.end()) {
            q.erase(it);
            return true;
        }
    }
    return false;
}

bool TxQueue::contains(PacketId id) const {
    return std::any_of(q_.begin(), q_.end(),
                       [id](const auto& q) { return std::find(q.begin(), q.end(), id) != q.end(); });
}

std::optional<std::pair<PriorityClass, PacketId>> TxQueue::next() const {
    for (PriorityClass cls : {PriorityClass::Urgent, PriorityClass::Normal}) {
        if (auto id = front(cls)) {
            return std::make_pair(cls, *id);
        }
    }
    return std::nullopt;
}

MacProtocol::MacProtocol(MacContext ctx, std::vector<NodeRole> roles, std::size_t queue_capacity)
    : ctx_(ctx), roles_(std::move(roles)), queues_(roles_.size(), TxQueue(queue_capacity)) {
    if (std::count(roles_.begin(), roles_.end(), NodeRole::SinkController) != 1) {
        throw ConfigError("exactly one sink/controller node is required");
    }
}

void MacProtocol::on_packet_arrival(NodeId node, PacketId packet) {
    if (role(node) != NodeRole::Sensor) {
        throw FatalError("packet arrival at the sink node " + std::to_string(node));
    }
    const PriorityClass cls = ledger().get(packet).cls;
    if (!queues_.at(node).push(cls, packet)) {
        ledger().record_drop(packet, DropReason::QueueOverflow, now());
        return;
    }
    on_enqueued(node, cls, packet);
}

void MacProtocol::on_frame(NodeId receiver, const Frame& frame, SimTime at) {
    on_frame_received(receiver, frame, at);
}

void MacProtocol::drop(NodeId node, PacketId packet, DropReason reason) {
    queues_.at(node).erase(packet);
    ledger().record_drop(packet, reason, now());
}

void MacProtocol::reject_frame(NodeId node, const Frame& frame) const {
    throw FatalError(std::string(name()) + ": node " + std::to_string(node) + " cannot handle frame kind " +
                     std::string(to_string(frame.kind)));
}

}  // namespace pmac
