#include "prioritymac/frogmac.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace pmac {

void FrogParams::validate(std::uint32_t packet_length) const {
    if (frag_size < 2 || frag_size > packet_length) {
        throw ConfigError("frag_size must lie in [2, " + std::to_string(packet_length) + "], got " +
                          std::to_string(frag_size));
    }
    if (cw_min == 0 || cw_max < cw_min) {
        throw ConfigError("contention window bounds must satisfy 0 < cw_min <= cw_max");
    }
    if (backoff_slot == 0) {
        throw ConfigError("backoff_slot must be positive");
    }
    if (!(ifs_urgent < ifs_normal)) {
        throw ConfigError("ifs_urgent must be shorter than ifs_normal");
    }
    if (gap_frag <= ifs_urgent + (cw_min - 1) * backoff_slot) {
        throw ConfigError("gap_frag " + std::to_string(gap_frag) +
                          " us leaves no room for an urgent RTS (needs > ifs_urgent + (cw_min-1) x backoff_slot = " +
                          std::to_string(ifs_urgent + (cw_min - 1) * backoff_slot) + " us)");
    }
    if (forced_backoff && *forced_backoff >= cw_max) {
        throw ConfigError("force_backoff must be below cw_max");
    }
}

std::uint32_t FragmentPlan::total_payload() const {
    return std::accumulate(payloads.begin(), payloads.end(), std::uint32_t{0});
}

std::uint32_t FragmentPlan::frame_bytes(std::size_t i) const {
    return count() == 1 ? payloads.at(0) : payloads.at(i) + header_bytes;
}

FragmentPlan fragment_packet(std::uint32_t length, std::uint32_t frag_size, std::uint32_t header_bytes,
                             PacketId parent) {
    if (frag_size < 2) {
        throw ConfigError("frag_size must be at least 2 bytes");
    }
    if (length == 0) {
        throw ConfigError("cannot fragment an empty packet");
    }
    FragmentPlan plan;
    plan.parent = parent;
    plan.header_bytes = header_bytes;
    for (std::uint32_t left = length; left > 0;) {
        const std::uint32_t take = std::min(left, frag_size);
        plan.payloads.push_back(take);
        left -= take;
    }
    return plan;
}

RaceOutcome preemption_race(std::span<const Contender> contenders, SimTime gap_start, const FrogParams& params) {
    RaceOutcome out;
    if (contenders.empty()) {
        return out;
    }
    std::uint32_t best = contenders.front().backoff_slots;
    for (const Contender& c : contenders) {
        best = std::min(best, c.backoff_slots);
    }
    std::vector<NodeId> leaders;
    for (const Contender& c : contenders) {
        if (c.backoff_slots == best) {
            leaders.push_back(c.node);
        }
    }
    std::sort(leaders.begin(), leaders.end());
    out.rts_at = gap_start + params.ifs_urgent + best * params.backoff_slot;
    out.within_gap = out.rts_at < gap_start + params.gap_frag;
    if (leaders.size() == 1) {
        out.winner = leaders.front();
    } else {
        out.collided = std::move(leaders);
    }
    return out;
}

FrogMac::FrogMac(MacContext ctx, std::vector<NodeRole> roles, std::size_t queue_capacity, FrogParams params,
                 FrameSizes sizes, std::uint64_t seed)
    : MacProtocol(ctx, std::move(roles), queue_capacity), params_(params), sizes_(sizes), nodes_(node_count()) {
    rngs_.reserve(node_count());
    for (NodeId n = 0; n < node_count(); ++n) {
        rngs_.emplace_back(seed, stream_id(n, StreamPurpose::Backoff));
    }
}

std::uint32_t FrogMac::contention_window(NodeId node) const {
    const NodeCtx& n = nodes_.at(node);
    return n.active ? n.active->cw : params_.cw_min;
}

void FrogMac::set_state(NodeId node, NodeState next) {
    NodeCtx& n = nodes_[node];
    if (next == NodeState::Suspended && n.state != NodeState::GapWait) {
        throw FatalError("frogmac: node " + std::to_string(node) + " suspended outside an inter-fragment gap");
    }
    n.state = next;
}

std::uint32_t FrogMac::draw_backoff(NodeId node, std::uint32_t cw) {
    if (backoff_source_) {
        return backoff_source_(node, cw);
    }
    if (params_.forced_backoff) {
        return *params_.forced_backoff;
    }
    return static_cast<std::uint32_t>(rngs_[node].uniform(cw));
}

FrogMac::Job FrogMac::make_job(NodeId node, PriorityClass cls, PacketId packet) const {
    (void)node;
    Job job;
    job.packet = packet;
    job.cls = cls;
    job.cw = params_.cw_min;
    const std::uint32_t length = ledger().get(packet).length_bytes;
    // Urgent packets travel whole.
    job.plan = cls == PriorityClass::Urgent ? fragment_packet(length, length, params_.header_bytes, packet)
                                            : fragment_packet(length, params_.frag_size, params_.header_bytes, packet);
    return job;
}

bool FrogMac::select_job(NodeId node) {
    NodeCtx& n = nodes_[node];
    const TxQueue& q = queue(node);
    if (n.active && n.active->cls == PriorityClass::Urgent) {
        return true;
    }
    if (auto urgent = q.front(PriorityClass::Urgent)) {
        if (n.active) {
            n.suspended = std::move(n.active);
        }
        n.active = make_job(node, PriorityClass::Urgent, *urgent);
        return true;
    }
    if (n.active) {
        return true;
    }
    if (n.suspended) {
        n.active = std::move(n.suspended);
        n.suspended.reset();
        return true;
    }
    if (auto normal = q.front(PriorityClass::Normal)) {
        n.active = make_job(node, PriorityClass::Normal, *normal);
        return true;
    }
    return false;
}

void FrogMac::begin_access(NodeId node) {
    NodeCtx& n = nodes_[node];
    if (!select_job(node)) {
        set_state(node, NodeState::Idle);
        return;
    }
    set_state(node, NodeState::Backoff);
    n.contending = true;
    n.ifs = n.active->cls == PriorityClass::Urgent ? params_.ifs_urgent : params_.ifs_normal;
    n.backoff_left = draw_backoff(node, n.active->cw);
    try_countdown(node);
}

void FrogMac::stop_contending(NodeCtx& n) {
    kernel().cancel(n.access_timer);
    kernel().cancel(n.nav_timer);
    n.access_timer = {};
    n.nav_timer = {};
    n.contending = false;
}

void FrogMac::try_countdown(NodeId node) {
    NodeCtx& n = nodes_[node];
    if (!n.contending) {
        return;
    }
    kernel().cancel(n.access_timer);
    kernel().cancel(n.nav_timer);
    n.access_timer = {};
    n.nav_timer = {};
    if (channel().carrier_sense(node) == CarrierState::Busy) {
        return;  // resumed by on_medium_idle
    }
    // Urgent contenders honor only the current exchange; normal ones also
    // respect the reservation of an ongoing fragmented transfer.
    SimTime block = std::max(n.own_tx_end, n.nav_until);
    if (n.active->cls == PriorityClass::Normal) {
        block = std::max(block, n.reserve_until);
    }
    if (block > now()) {
        n.nav_timer = kernel().schedule(block, node, EventKind::Timer, [this, node] { try_countdown(node); });
        return;
    }
    n.countdown_start = now() + n.ifs;
    n.access_expiry = n.countdown_start + n.backoff_left * params_.backoff_slot;
    n.access_timer = kernel().schedule(n.access_expiry, node, EventKind::Timer, [this, node] { on_access(node); });
}

void FrogMac::on_medium_busy(SimTime at) {
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        NodeCtx& n = nodes_[id];
        if (!n.contending) {
            continue;
        }
        kernel().cancel(n.nav_timer);
        n.nav_timer = {};
        if (!kernel().pending(n.access_timer)) {
            continue;
        }
        if (n.access_expiry == at) {
            continue;  // counted down in the same instant: transmits and collides
        }
        kernel().cancel(n.access_timer);
        n.access_timer = {};
        if (at > n.countdown_start) {
            const std::uint32_t elapsed = static_cast<std::uint32_t>((at - n.countdown_start) / params_.backoff_slot);
            n.backoff_left -= std::min(n.backoff_left, elapsed);
        }
    }
}

void FrogMac::on_medium_idle(SimTime /*at*/) {
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        NodeCtx& n = nodes_[id];
        if (n.contending && !kernel().pending(n.access_timer)) {
            try_countdown(id);
        }
    }
}

Duration FrogMac::unit_airtime(const Job& job) const {
    return channel().airtime(job.plan.frame_bytes(job.cursor));
}

Duration FrogMac::remaining_duration(const Job& job) const {
    const Duration ack = channel().airtime(sizes_.control);
    Duration total = 0;
    for (std::size_t i = job.cursor; i < job.plan.count(); ++i) {
        total += channel().airtime(job.plan.frame_bytes(i)) + params_.sifs + ack;
        if (i + 1 < job.plan.count()) {
            total += params_.gap_frag;
        }
    }
    return total;
}

void FrogMac::on_access(NodeId node) {
    NodeCtx& n = nodes_[node];
    n.access_timer = {};
    n.contending = false;
    const Job& job = *n.active;
    const Duration ctl = channel().airtime(sizes_.control);
    const SimTime t = now();
    Frame rts;
    rts.kind = FrameKind::Rts;
    rts.dst = kSinkId;
    rts.length_bytes = sizes_.control;
    rts.packet = job.packet;
    rts.nav_until = t + ctl + params_.sifs + ctl + params_.sifs + unit_airtime(job) + params_.sifs + ctl;
    if (job.cls == PriorityClass::Normal) {
        rts.reserve_until = t + ctl + params_.sifs + ctl + params_.sifs + remaining_duration(job);
    }
    n.own_tx_end = channel().transmit(node, std::move(rts));
    ++stats_.rts_sent;
    set_state(node, NodeState::SentRts);
    kernel().schedule(n.own_tx_end, node, EventKind::Timer, [this, node] {
        if (nodes_[node].state == NodeState::SentRts) {
            set_state(node, NodeState::AwaitCts);
        }
    });
    n.response_timer = kernel().schedule(n.own_tx_end + params_.ack_timeout, node, EventKind::Timer,
                                         [this, node] { on_timeout(node); });
}

void FrogMac::send_unit(NodeId node, Duration lead) {
    NodeCtx& n = nodes_[node];
    Job& job = *n.active;
    const Duration ctl = channel().airtime(sizes_.control);
    const SimTime at = now() + lead;
    Frame f;
    f.dst = kSinkId;
    f.packet = job.packet;
    f.length_bytes = job.plan.frame_bytes(job.cursor);
    if (job.plan.count() == 1) {
        f.kind = FrameKind::Data;
    } else {
        f.kind = FrameKind::Fragment;
        f.frag_index = static_cast<std::uint32_t>(job.cursor);
        f.frag_count = static_cast<std::uint32_t>(job.plan.count());
        ++stats_.fragments_sent;
    }
    const SimTime end = at + channel().airtime(f);
    f.nav_until = end + params_.sifs + ctl;
    if (job.cls == PriorityClass::Normal) {
        f.reserve_until = at + remaining_duration(job);
    }
    job.data_in_flight = true;
    n.own_tx_end = channel().transmit(node, std::move(f), at);
    set_state(node, job.plan.count() == 1 ? NodeState::TxData : NodeState::TxFragment);
    kernel().schedule(n.own_tx_end, node, EventKind::Timer, [this, node] {
        const NodeState s = nodes_[node].state;
        if (s == NodeState::TxData || s == NodeState::TxFragment) {
            set_state(node, NodeState::AwaitAck);
        }
    });
    n.response_timer = kernel().schedule(n.own_tx_end + params_.ack_timeout, node, EventKind::Timer,
                                         [this, node] { on_timeout(node); });
}

void FrogMac::on_cts(NodeId node) {
    NodeCtx& n = nodes_[node];
    if (n.state != NodeState::AwaitCts || !n.active) {
        return;
    }
    kernel().cancel(n.response_timer);
    n.response_timer = {};
    send_unit(node, params_.sifs);
}

void FrogMac::on_ack(NodeId node) {
    NodeCtx& n = nodes_[node];
    if (n.state != NodeState::AwaitAck || !n.active) {
        return;
    }
    kernel().cancel(n.response_timer);
    n.response_timer = {};
    Job& job = *n.active;
    job.data_in_flight = false;
    job.retries = 0;
    job.cw = params_.cw_min;
    if (job.cls == PriorityClass::Urgent) {
        finish_job(node);
        return;
    }
    ++job.cursor;
    if (job.cursor == job.plan.count()) {
        finish_job(node);
        return;
    }
    ++stats_.gaps;
    set_state(node, NodeState::GapWait);
    if (!queue(node).empty(PriorityClass::Urgent)) {
        suspend_active(node);
        begin_access(node);
        return;
    }
    n.gap_watch = lone_urgent_contender(node);
    n.gap_timer = kernel().schedule(now() + params_.gap_frag, node, EventKind::Timer, [this, node] { on_gap_end(node); });
}

std::optional<NodeId> FrogMac::lone_urgent_contender(NodeId holder) const {
    std::optional<NodeId> found;
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        const NodeCtx& n = nodes_[id];
        if (id == holder || !n.active || n.active->cls != PriorityClass::Urgent) {
            continue;
        }
        if (n.state != NodeState::Backoff) {
            return std::nullopt;  // another urgent exchange is under way
        }
        if (found) {
            return std::nullopt;
        }
        found = id;
    }
    if (found && nodes_[*found].active->cw != params_.cw_min) {
        return std::nullopt;
    }
    return found;
}

void FrogMac::on_gap_end(NodeId node) {
    NodeCtx& n = nodes_[node];
    n.gap_timer = {};
    const bool seized = channel().carrier_sense(node) == CarrierState::Busy || n.nav_until > now();
    if (n.gap_watch) {
        ++stats_.gap_checks;
        const NodeCtx& u = nodes_[*n.gap_watch];
        if (!seized && u.active && u.active->cls == PriorityClass::Urgent && u.state == NodeState::Backoff) {
            throw FatalError("frogmac: pending urgent node " + std::to_string(*n.gap_watch) +
                             " did not seize the inter-fragment gap");
        }
        n.gap_watch.reset();
    }
    if (seized) {
        ++stats_.preemptions;
        suspend_active(node);
        begin_access(node);
        return;
    }
    send_unit(node, 0);
}

void FrogMac::suspend_active(NodeId node) {
    NodeCtx& n = nodes_[node];
    kernel().cancel(n.gap_timer);
    n.gap_timer = {};
    n.gap_watch.reset();
    set_state(node, NodeState::Suspended);
    n.suspended = std::move(n.active);
    n.active.reset();
}

void FrogMac::on_timeout(NodeId node) {
    NodeCtx& n = nodes_[node];
    n.response_timer = {};
    if (!n.active) {
        return;
    }
    Job& job = *n.active;
    if (n.state == NodeState::AwaitCts || n.state == NodeState::SentRts) {
        ++stats_.cts_timeouts;
    } else {
        ++stats_.ack_timeouts;
    }
    job.data_in_flight = false;
    ++job.retries;
    job.cw = std::min(job.cw * 2, params_.cw_max);
    const Packet& p = ledger().get(job.packet);
    if (p.deadline_at && *p.deadline_at <= now()) {
        abandon_job(node, DropReason::DeadlineExpired);
        return;
    }
    if (job.retries > params_.retry_limit) {
        abandon_job(node, DropReason::RetryLimit);
        return;
    }
    begin_access(node);
}

void FrogMac::finish_job(NodeId node) {
    NodeCtx& n = nodes_[node];
    const Job& job = *n.active;
    if (queue(node).front(job.cls) == job.packet) {
        queue_mut(node).pop(job.cls);
    } else {
        queue_mut(node).erase(job.packet);
    }
    n.active.reset();
    begin_access(node);
}

void FrogMac::abandon_job(NodeId node, DropReason reason) {
    NodeCtx& n = nodes_[node];
    const PacketId packet = n.active->packet;
    if (ledger().delivered(packet)) {
        // The sink has it; only the acknowledgement was lost.
        finish_job(node);
        return;
    }
    drop(node, packet, reason);
    n.active.reset();
    begin_access(node);
}

void FrogMac::on_deadline(NodeId node, PacketId packet) {
    if (ledger().finalized(packet)) {
        return;
    }
    NodeCtx& n = nodes_[node];
    if (n.active && n.active->packet == packet) {
        if (n.active->data_in_flight) {
            return;  // resolved by the ACK or its timeout
        }
        stop_contending(n);
        kernel().cancel(n.response_timer);
        n.response_timer = {};
        drop(node, packet, DropReason::DeadlineExpired);
        n.active.reset();
        begin_access(node);
        return;
    }
    drop(node, packet, DropReason::DeadlineExpired);
}

void FrogMac::on_enqueued(NodeId node, PriorityClass cls, PacketId packet) {
    NodeCtx& n = nodes_[node];
    if (cls == PriorityClass::Urgent) {
        kernel().schedule(*ledger().get(packet).deadline_at, node, EventKind::Timer,
                          [this, node, packet] { on_deadline(node, packet); });
    }
    switch (n.state) {
        case NodeState::Idle:
            begin_access(node);
            break;
        case NodeState::GapWait:
            if (cls == PriorityClass::Urgent) {
                suspend_active(node);
                begin_access(node);
            }
            break;
        case NodeState::Backoff:
            if (cls == PriorityClass::Urgent && n.active && n.active->cls == PriorityClass::Normal) {
                stop_contending(n);
                n.suspended = std::move(n.active);
                n.active.reset();
                begin_access(node);
            }
            break;
        default:
            break;  // picked up when the current exchange ends
    }
}

void FrogMac::on_frame_received(NodeId node, const Frame& frame, SimTime at) {
    if (role(node) == NodeRole::SinkController) {
        sink_receive(frame, at);
        return;
    }
    NodeCtx& n = nodes_[node];
    if (frame.dst != node) {
        switch (frame.kind) {
            case FrameKind::Rts:
            case FrameKind::Cts:
            case FrameKind::Data:
            case FrameKind::Fragment:
            case FrameKind::Ack:
                n.nav_until = std::max(n.nav_until, frame.nav_until);
                n.reserve_until = std::max(n.reserve_until, frame.reserve_until);
                return;
            default:
                reject_frame(node, frame);
        }
    }
    switch (frame.kind) {
        case FrameKind::Cts: on_cts(node); return;
        case FrameKind::Ack: on_ack(node); return;
        default: reject_frame(node, frame);
    }
}

void FrogMac::sink_respond(FrameKind kind, const Frame& to, SimTime at) {
    Frame f;
    f.kind = kind;
    f.dst = to.src;
    f.length_bytes = sizes_.control;
    f.packet = to.packet;
    if (kind == FrameKind::Cts) {
        f.nav_until = to.nav_until;
        f.reserve_until = to.reserve_until;
    }
    const SimTime start = at + params_.sifs;
    sink_busy_until_ = channel().transmit(kSinkId, std::move(f), start);
}

void FrogMac::sink_receive(const Frame& frame, SimTime at) {
    if (frame.dst != kSinkId) {
        reject_frame(kSinkId, frame);
    }
    switch (frame.kind) {
        case FrameKind::Rts:
            if (sink_busy_until_ <= at) {
                sink_respond(FrameKind::Cts, frame, at);
            }
            return;
        case FrameKind::Data: {
            const PacketId id = *frame.packet;
            if (!ledger().finalized(id)) {
                ledger().record_delivery(id, at);
            }
            sink_respond(FrameKind::Ack, frame, at);
            return;
        }
        case FrameKind::Fragment: {
            const PacketId id = *frame.packet;
            Reassembly& r = reassembly_[frame.src];
            if (!r.open || r.packet != id) {
                if (frame.frag_index != 0) {
                    throw FatalError("frogmac: fragment " + std::to_string(frame.frag_index) + " of packet " +
                                     std::to_string(id) + " arrived before fragment 0");
                }
                r = Reassembly{id, 0, true};
            }
            if (frame.frag_index == r.next) {
                ++r.next;
                ++stats_.fragments_in_order;
                if (r.next == frame.frag_count) {
                    ++stats_.reassembled;
                    if (!ledger().finalized(id)) {
                        ledger().record_delivery(id, at);
                    }
                }
            } else if (frame.frag_index < r.next) {
                ++stats_.duplicate_fragments;
            } else {
                throw FatalError("frogmac: fragment gap in packet " + std::to_string(id));
            }
            sink_respond(FrameKind::Ack, frame, at);
            return;
        }
        default:
            reject_frame(kSinkId, frame);
    }
}

}  // namespace pmac
