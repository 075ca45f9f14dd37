#include "prioritymac/sim_kernel.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace pmac {

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Timer: return "timer";
        case EventKind::FrameStart: return "frame_start";
        case EventKind::FrameEnd: return "frame_end";
        case EventKind::SlotBoundary: return "slot_boundary";
        case EventKind::Arrival: return "arrival";
    }
    return "unknown";
}

EventHandle Kernel::schedule(SimTime at, NodeId target, EventKind kind, Action action) {
    if (at < now_) {
        throw FatalError("Kernel::schedule: event at t=" + std::to_string(at) +
                         " lies before the clock t=" + std::to_string(now_));
    }
    const std::uint64_t seq = next_seq_++;
    heap_.push_back(Entry{at, seq, target, kind, std::move(action)});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
    live_.insert(seq);
    return EventHandle{seq, true};
}

bool Kernel::cancel(EventHandle handle) {
    if (!handle.valid) {
        return false;
    }
    return live_.erase(handle.seq) > 0;
}

bool Kernel::pending(EventHandle handle) const {
    return handle.valid && live_.count(handle.seq) > 0;
}

std::uint64_t Kernel::run_until(SimTime end) {
    std::uint64_t count = 0;
    while (!heap_.empty() && heap_.front().at <= end) {
        std::pop_heap(heap_.begin(), heap_.end(), Later{});
        Entry entry = std::move(heap_.back());
        heap_.pop_back();
        if (live_.erase(entry.seq) == 0) {
            continue;  // cancelled
        }
        now_ = entry.at;
        if (trace_ != nullptr) {
            *trace_ << entry.at << ',' << entry.seq << ',';
            if (entry.target == kChannelTarget) {
                *trace_ << "channel";
            } else {
                *trace_ << entry.target;
            }
            *trace_ << ',' << to_string(entry.kind) << '\n';
        }
        ++count;
        ++processed_;
        entry.action();
    }
    if (end > now_) {
        now_ = end;
    }
    return count;
}

}  // namespace pmac
