#include "prioritymac/radio_channel.hpp"

#include <algorithm>
#include <string>

namespace pmac {

std::string_view to_string(FrameKind kind) {
    switch (kind) {
        case FrameKind::Data: return "DATA";
        case FrameKind::Fragment: return "FRAGMENT";
        case FrameKind::Rts: return "RTS";
        case FrameKind::Cts: return "CTS";
        case FrameKind::Ack: return "ACK";
        case FrameKind::EisInd: return "EIS_IND";
        case FrameKind::RrpReq: return "RRP_REQ";
        case FrameKind::DspBcast: return "DSP_BCAST";
    }
    return "UNKNOWN";
}

RadioChannel::RadioChannel(Kernel& kernel, ChannelConfig config) : kernel_(kernel), config_(config) {
    if (config_.byte_time == 0) {
        throw ConfigError("byte_time must be positive");
    }
}

void RadioChannel::attach(ChannelListener* listener, std::vector<NodeId> nodes) {
    std::sort(nodes.begin(), nodes.end());
    listeners_.emplace_back(listener, std::move(nodes));
}

SimTime RadioChannel::transmit(NodeId src, Frame frame, SimTime at) {
    if (frame.length_bytes == 0) {
        throw FatalError("RadioChannel::transmit: zero-length frame");
    }
    const SimTime end = at + airtime(frame);
    SimTime& booked = booked_until_[src];
    if (at < booked) {
        throw FatalError("RadioChannel: node " + std::to_string(src) + " overlaps its own transmission");
    }
    booked = end;
    if (at == kernel_.now()) {
        start(src, std::move(frame), at);
    } else {
        kernel_.schedule(at, kChannelTarget, EventKind::FrameStart,
                         [this, src, f = std::move(frame), at]() mutable { start(src, std::move(f), at); });
    }
    return end;
}

bool RadioChannel::busy_at(SimTime at, NodeId exclude) const {
    return std::any_of(active_.begin(), active_.end(), [&](const auto& kv) {
        const TxRecord& r = kv.second.record;
        return r.src != exclude && r.start <= at && at < r.end;
    });
}

bool RadioChannel::transmitting(NodeId node) const {
    const SimTime now = kernel_.now();
    return std::any_of(active_.begin(), active_.end(), [&](const auto& kv) {
        const TxRecord& r = kv.second.record;
        return r.src == node && r.start <= now && now < r.end;
    });
}

void RadioChannel::start(NodeId src, Frame frame, SimTime at) {
    const SimTime end = at + airtime(frame);
    bool was_busy = false;
    bool corrupted = false;
    for (auto& [id, other] : active_) {
        if (other.record.end <= at) {
            continue;  // finished at this very instant; half-open intervals do not overlap
        }
        if (other.record.src == src) {
            throw FatalError("RadioChannel: node " + std::to_string(src) +
                             " started a transmission while still transmitting");
        }
        was_busy = true;
        corrupted = true;
        other.record.intact = false;
    }
    const std::uint64_t id = next_id_++;
    frame.src = src;
    const FrameKind kind = frame.kind;
    active_.emplace(id, Active{TxRecord{id, src, at, end, kind, !corrupted}, std::move(frame)});
    ++stats_.sent[static_cast<std::size_t>(kind)];
    if (kind == FrameKind::EisInd) {
        eis_windows_.emplace_back(at, end);
        while (eis_windows_.size() > 64) {
            eis_windows_.pop_front();
        }
    }
    kernel_.schedule(end, kChannelTarget, EventKind::FrameEnd, [this, id] { finish(id); });
    if (!was_busy) {
        for (auto& [listener, nodes] : listeners_) {
            listener->on_medium_busy(at);
        }
    }
}

void RadioChannel::finish(std::uint64_t id) {
    auto it = active_.find(id);
    if (it == active_.end()) {
        throw FatalError("RadioChannel: unknown transmission finished");
    }
    Active done = std::move(it->second);
    active_.erase(it);
    if (!done.record.intact) {
        ++stats_.corrupted[static_cast<std::size_t>(done.record.kind)];
    }
    if (record_) {
        history_.push_back(done.record);
    }
    const SimTime now = kernel_.now();
    if (done.record.intact) {
        for (auto& [listener, nodes] : listeners_) {
            for (NodeId n : nodes) {
                if (n != done.record.src) {
                    listener->on_frame(n, done.frame, now);
                }
            }
        }
    }
    if (!busy_at(now, kBroadcast)) {
        for (auto& [listener, nodes] : listeners_) {
            listener->on_medium_idle(now);
        }
    }
}

CarrierState RadioChannel::carrier_sense(NodeId node, SimTime at) const {
    return busy_at(at, node) ? CarrierState::Busy : CarrierState::Idle;
}

bool RadioChannel::or_channel_sense(NodeId /*controller*/, SimTime from, SimTime to) const {
    return std::any_of(eis_windows_.begin(), eis_windows_.end(),
                       [&](const auto& w) { return w.first < to && from < w.second; });
}

}  // namespace pmac
