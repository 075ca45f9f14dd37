#include "prioritymac/ssmac.hpp"

#include <algorithm>
#include <string>

namespace pmac {

Duration SuperframeConfig::cycle_length() const {
    if (nc_slot_count == 0) {
        return eis;
    }
    if (eis_per_slot) {
        return nc_slot_count * (nc_slot + eis);
    }
    return nc_slot_count * nc_slot + eis;
}

SuperframeGrid::SuperframeGrid(const SuperframeConfig& config) : period_(config.cycle_length()) {
    const std::size_t n = config.nc_slot_count;
    if (n == 0) {
        items_.push_back({0, GridItemKind::Eis, 0});
    } else if (config.eis_per_slot) {
        const Duration sub = config.nc_slot + config.eis;
        for (std::size_t i = 0; i < n; ++i) {
            items_.push_back({i * sub, GridItemKind::NcSlot, i});
            items_.push_back({i * sub + config.nc_slot, GridItemKind::Eis, i});
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            items_.push_back({i * config.nc_slot, GridItemKind::NcSlot, i});
        }
        items_.push_back({n * config.nc_slot, GridItemKind::Eis, n - 1});
    }
    for (const Offset& o : items_) {
        if (o.kind == GridItemKind::Eis) {
            eis_offsets_.push_back(o.offset);
        }
    }
    if (period_ == 0) {
        throw ConfigError("superframe cycle length must be positive");
    }
}

GridItem SuperframeGrid::next_item(SimTime anchor, SimTime t) const {
    t = std::max(t, anchor);
    const Duration off = (t - anchor) % period_;
    const SimTime base = t - off;
    auto it = std::lower_bound(items_.begin(), items_.end(), off,
                               [](const Offset& o, Duration v) { return o.offset < v; });
    if (it == items_.end()) {
        return GridItem{items_.front().kind, items_.front().slot, base + period_ + items_.front().offset};
    }
    return GridItem{it->kind, it->slot, base + it->offset};
}

SimTime SuperframeGrid::next_eis(SimTime anchor, SimTime t) const {
    t = std::max(t, anchor);
    const Duration off = (t - anchor) % period_;
    const SimTime base = t - off;
    auto it = std::lower_bound(eis_offsets_.begin(), eis_offsets_.end(), off);
    if (it == eis_offsets_.end()) {
        return base + period_ + eis_offsets_.front();
    }
    return base + *it;
}

Duration next_eis_wait(SimTime arrival, const SuperframeConfig& config, SimTime cycle_start) {
    if (arrival < cycle_start) {
        throw std::invalid_argument("next_eis_wait: arrival precedes the cycle start");
    }
    return SuperframeGrid(config).next_eis(cycle_start, arrival) - arrival;
}

CaoTable assign_cao(std::span<const RrpRequest> requests) {
    std::vector<RrpRequest> sorted(requests.begin(), requests.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const RrpRequest& a, const RrpRequest& b) {
        return a.deadline != b.deadline ? a.deadline < b.deadline : a.node < b.node;
    });
    CaoTable table;
    table.reserve(sorted.size());
    std::uint32_t rank = 1;
    for (const RrpRequest& r : sorted) {
        table.push_back(CaoEntry{r.node, r.deadline, rank++});
    }
    return table;
}

bool is_valid_cao(const CaoTable& table) {
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].rank != i + 1) {
            return false;
        }
        if (i > 0) {
            const CaoEntry& prev = table[i - 1];
            const CaoEntry& cur = table[i];
            if (cur.deadline < prev.deadline || (cur.deadline == prev.deadline && cur.node <= prev.node)) {
                return false;
            }
        }
    }
    return true;
}

SsMac::SsMac(MacContext ctx, std::vector<NodeRole> roles, std::size_t queue_capacity, SuperframeConfig timing,
             FrameSizes sizes, Layout layout)
    : MacProtocol(ctx, std::move(roles), queue_capacity),
      timing_([&] {
          timing.nc_slot_count = layout.nc_owners.size();
          timing.rrp_subslot_count = layout.urgent_nodes.size();
          return timing;
      }()),
      sizes_(sizes),
      layout_(std::move(layout)),
      grid_(timing_),
      nodes_(node_count()) {
    const Duration data_air = channel().airtime(timing_.data_bytes);
    const Duration ctl_air = channel().airtime(sizes_.control);
    if (ctl_air > timing_.eis) {
        throw ConfigError("EIS window shorter than an EIS indication");
    }
    if (ctl_air > timing_.rrp_subslot) {
        throw ConfigError("RRP subslot shorter than a reservation request");
    }
    if (data_air + timing_.sifs + ctl_air > timing_.nc_slot) {
        throw ConfigError("non-critical slot cannot hold DATA + SIFS + ACK");
    }
    for (std::size_t i = 0; i < layout_.urgent_nodes.size(); ++i) {
        NodeCtx& n = nodes_.at(layout_.urgent_nodes[i]);
        n.urgent_capable = true;
        n.rrp_index = i;
    }
}

void SsMac::start() {
    anchor_ = 0;
    phase_ = Phase::NcCycle;
    reschedule(0);
}

bool SsMac::any_urgent_pending() const {
    return std::any_of(layout_.urgent_nodes.begin(), layout_.urgent_nodes.end(),
                       [this](NodeId n) { return !queue(n).empty(PriorityClass::Urgent); });
}

bool SsMac::interesting(const GridItem& item) const {
    if (item.kind == GridItemKind::Eis) {
        return any_urgent_pending();
    }
    const TxQueue& q = queue(layout_.nc_owners[item.slot]);
    // A node with an urgent packet pending leaves its non-critical slot unused.
    return !q.empty(PriorityClass::Normal) && q.empty(PriorityClass::Urgent);
}

void SsMac::reschedule(SimTime from) {
    kernel().cancel(boundary_);
    boundary_ = {};
    if (phase_ != Phase::NcCycle) {
        return;
    }
    SimTime t = from;
    if (last_item_ && t <= *last_item_) {
        t = *last_item_ + 1;
    }
    // Skip items nobody needs; if nothing is pending the controller sleeps
    // until the next arrival re-evaluates the schedule.
    const SimTime horizon = t + grid_.period();
    for (GridItem item = grid_.next_item(anchor_, t); item.at <= horizon; item = grid_.next_item(anchor_, item.at + 1)) {
        if (interesting(item)) {
            boundary_ = kernel().schedule(item.at, kSinkId, EventKind::SlotBoundary, [this, item] { on_item(item); });
            return;
        }
    }
}

void SsMac::on_item(const GridItem& item) {
    boundary_ = {};
    last_item_ = item.at;
    if (item.kind == GridItemKind::Eis) {
        begin_eis(item.at);
        return;
    }
    if (interesting(item)) {
        send_normal(layout_.nc_owners[item.slot]);
    }
    reschedule(item.at + 1);
}

void SsMac::send_normal(NodeId owner) {
    const PacketId id = *queue(owner).front(PriorityClass::Normal);
    Frame f;
    f.kind = FrameKind::Data;
    f.dst = kSinkId;
    f.length_bytes = ledger().get(id).length_bytes;
    f.packet = id;
    channel().transmit(owner, std::move(f));
}

void SsMac::begin_eis(SimTime t) {
    phase_ = Phase::EisWindow;
    eis_start_ = t;
    for (PacketId id : awaiting_first_eis_) {
        const Packet& p = ledger().get(id);
        first_eis_.emplace(id, t);
        stats_.eis_waits.push_back(t - p.generated_at);
    }
    awaiting_first_eis_.clear();
    for (NodeId n : layout_.urgent_nodes) {
        if (nodes_[n].state == NodeState::AwaitEis && !queue(n).empty(PriorityClass::Urgent)) {
            indicate(n);
        }
    }
    kernel().schedule(t + timing_.eis, kSinkId, EventKind::SlotBoundary, [this] { end_eis(); });
}

void SsMac::indicate(NodeId node) {
    Frame f;
    f.kind = FrameKind::EisInd;
    f.dst = kSinkId;
    f.length_bytes = sizes_.control;
    channel().transmit(node, std::move(f));
    nodes_[node].state = NodeState::SentInd;
}

void SsMac::end_eis() {
    const SimTime t = now();
    if (channel().or_channel_sense(kSinkId, eis_start_, t)) {
        ++stats_.critical_cycles;
        begin_rrp(t);
        return;
    }
    phase_ = Phase::NcCycle;
    reschedule(t);
}

void SsMac::begin_rrp(SimTime t) {
    phase_ = Phase::Rrp;
    rrp_start_ = t;
    requests_.clear();
    for (std::size_t i = 0; i < layout_.urgent_nodes.size(); ++i) {
        const NodeId n = layout_.urgent_nodes[i];
        if (nodes_[n].state == NodeState::SentInd) {
            kernel().schedule(t + i * timing_.rrp_subslot, n, EventKind::SlotBoundary, [this, n] { rrp_subslot(n); });
        }
    }
    // one hop later, after the last request's FrameEnd
    kernel().schedule(t + timing_.rrp_total(), kSinkId, EventKind::SlotBoundary, [this] {
        kernel().schedule(now(), kSinkId, EventKind::SlotBoundary, [this] { begin_dsp(); });
    });
}

void SsMac::rrp_subslot(NodeId node) {
    NodeCtx& n = nodes_[node];
    if (n.state != NodeState::SentInd) {
        return;
    }
    // Only a packet that was already waiting when the EIS opened may be
    // requested; later arrivals indicate at the next EIS.
    const auto head = queue(node).front(PriorityClass::Urgent);
    if (!head || ledger().get(*head).generated_at > eis_start_) {
        settle(node);
        return;
    }
    const Packet& p = ledger().get(*head);
    Frame f;
    f.kind = FrameKind::RrpReq;
    f.dst = kSinkId;
    f.length_bytes = sizes_.control;
    f.packet = p.id;
    f.deadline = *p.deadline_at;
    channel().transmit(node, std::move(f));
    n.requested = p.id;
    n.state = NodeState::AwaitCao;
}

void SsMac::begin_dsp() {
    const SimTime t = now();
    phase_ = Phase::Dsp;
    CaoTable table = assign_cao(requests_);
    if (!is_valid_cao(table)) {
        throw FatalError("ssmac: controller produced an invalid CAO table");
    }
    ++stats_.cao_tables;
    stats_.grants += table.size();
    Frame f;
    f.kind = FrameKind::DspBcast;
    f.dst = kBroadcast;
    f.length_bytes = sizes_.dsp_bytes(table.size());
    const Duration dsp_len = std::max(timing_.dsp, channel().airtime(f));
    const SimTime dtp_start = t + dsp_len;
    const std::size_t k = table.size();
    f.schedule_start = dtp_start;
    f.cao = std::move(table);
    channel().transmit(kSinkId, std::move(f));
    kernel().schedule(dtp_start, kSinkId, EventKind::SlotBoundary, [this, k] {
        phase_ = Phase::Dtp;
        kernel().schedule(now() + k * timing_.nc_slot, kSinkId, EventKind::SlotBoundary, [this] { end_critical(); });
    });
}

void SsMac::dtp_slot(NodeId node, PacketId packet) {
    NodeCtx& n = nodes_[node];
    if (n.granted != packet || ledger().finalized(packet)) {
        ++stats_.empty_dtp_slots;
        return;
    }
    Frame f;
    f.kind = FrameKind::Data;
    f.dst = kSinkId;
    f.length_bytes = ledger().get(packet).length_bytes;
    f.packet = packet;
    channel().transmit(node, std::move(f));
    n.state = NodeState::TxData;
}

void SsMac::end_critical() {
    const SimTime t = now();
    anchor_ += t - (eis_start_ + timing_.eis);
    phase_ = Phase::NcCycle;
    for (NodeId n : layout_.urgent_nodes) {
        if (nodes_[n].state != NodeState::Idle && nodes_[n].state != NodeState::AwaitEis) {
            settle(n);
        }
    }
    reschedule(t);
}

void SsMac::settle(NodeId node) {
    NodeCtx& n = nodes_[node];
    n.requested.reset();
    n.granted.reset();
    n.state = queue(node).empty(PriorityClass::Urgent) ? NodeState::Idle : NodeState::AwaitEis;
}

void SsMac::on_enqueued(NodeId node, PriorityClass cls, PacketId packet) {
    if (cls == PriorityClass::Urgent) {
        NodeCtx& n = nodes_[node];
        if (!n.urgent_capable) {
            throw FatalError("ssmac: urgent packet at a node without an RRP subslot");
        }
        kernel().schedule(*ledger().get(packet).deadline_at, node, EventKind::Timer,
                          [this, node, packet] { on_deadline(node, packet); });
        if (n.state == NodeState::Idle) {
            n.state = NodeState::AwaitEis;
        }
        if (phase_ == Phase::EisWindow && now() == eis_start_) {
            first_eis_.emplace(packet, now());
            stats_.eis_waits.push_back(0);
            if (n.state == NodeState::AwaitEis) {
                indicate(node);
            }
        } else {
            awaiting_first_eis_.push_back(packet);
        }
    }
    if (phase_ == Phase::NcCycle) {
        reschedule(now());
    }
}

void SsMac::on_deadline(NodeId node, PacketId packet) {
    if (ledger().finalized(packet)) {
        return;
    }
    NodeCtx& n = nodes_[node];
    if (n.state == NodeState::TxData && n.granted == packet) {
        return;  // DATA already on air; the sink decides
    }
    drop(node, packet, DropReason::DeadlineExpired);
    std::erase(awaiting_first_eis_, packet);
    if (n.granted == packet) {
        n.granted.reset();
    }
    if (n.requested == packet) {
        n.requested.reset();
    }
    if (n.state == NodeState::AwaitEis && queue(node).empty(PriorityClass::Urgent)) {
        n.state = NodeState::Idle;
    }
}

void SsMac::on_frame_received(NodeId node, const Frame& frame, SimTime at) {
    if (role(node) == NodeRole::SinkController) {
        sink_receive(frame, at);
    } else {
        sensor_receive(node, frame);
    }
}

void SsMac::sink_receive(const Frame& frame, SimTime at) {
    switch (frame.kind) {
        case FrameKind::EisInd:
            return;  // sensed through the OR-channel at the end of the window
        case FrameKind::RrpReq: {
            const NodeCtx& n = nodes_.at(frame.src);
            const SimTime start = at - channel().airtime(frame);
            const SimTime lo = rrp_start_ + n.rrp_index * timing_.rrp_subslot;
            if (phase_ != Phase::Rrp || !n.urgent_capable || start < lo || at > lo + timing_.rrp_subslot) {
                throw FatalError("ssmac: node " + std::to_string(frame.src) + " sent RRP_REQ outside its subslot");
            }
            requests_.push_back(RrpRequest{frame.src, frame.deadline});
            return;
        }
        case FrameKind::Data: {
            const PacketId id = *frame.packet;
            const Packet& p = ledger().get(id);
            if (!p.finalized()) {
                ledger().record_delivery(id, at);
                if (p.cls == PriorityClass::Urgent) {
                    auto it = first_eis_.find(id);
                    if (it == first_eis_.end()) {
                        throw FatalError("ssmac: urgent packet delivered without passing an EIS");
                    }
                    const Duration bound =
                        (it->second - p.generated_at) + timing_.eis + timing_.rrp_total() + timing_.dsp;
                    ++stats_.lower_bound_checks;
                    if (at - p.generated_at < bound) {
                        throw FatalError("ssmac: urgent delay below the EIS + RRP + DSP lower bound");
                    }
                    first_eis_.erase(it);
                }
            }
            Frame ack;
            ack.kind = FrameKind::Ack;
            ack.dst = frame.src;
            ack.length_bytes = sizes_.control;
            ack.packet = id;
            channel().transmit(kSinkId, std::move(ack), at + timing_.sifs);
            return;
        }
        default:
            reject_frame(kSinkId, frame);
    }
}

void SsMac::sensor_receive(NodeId node, const Frame& frame) {
    switch (frame.kind) {
        case FrameKind::DspBcast: {
            NodeCtx& n = nodes_[node];
            if (n.state != NodeState::AwaitCao) {
                return;
            }
            auto it = std::find_if(frame.cao.begin(), frame.cao.end(), [node](const CaoEntry& e) { return e.node == node; });
            if (it == frame.cao.end() || !n.requested) {
                settle(node);
                return;
            }
            const PacketId packet = *n.requested;
            n.granted = packet;
            n.state = NodeState::AwaitDtp;
            kernel().schedule(frame.schedule_start + (it->rank - 1) * timing_.nc_slot, node, EventKind::SlotBoundary,
                              [this, node, packet] { dtp_slot(node, packet); });
            return;
        }
        case FrameKind::Ack: {
            if (frame.dst != node) {
                return;
            }
            const PacketId id = *frame.packet;
            const Packet& p = ledger().get(id);
            if (queue(node).front(p.cls) == id) {
                queue_mut(node).pop(p.cls);
            }
            if (p.cls == PriorityClass::Urgent) {
                settle(node);
            }
            if (phase_ == Phase::NcCycle) {
                reschedule(now());
            }
            return;
        }
        case FrameKind::Data:
        case FrameKind::EisInd:
        case FrameKind::RrpReq:
            return;  // overheard sensor uplink
        default:
            reject_frame(node, frame);
    }
}

}  // namespace pmac
