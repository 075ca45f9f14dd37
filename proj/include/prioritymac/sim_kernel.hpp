#pragma once

#include "prioritymac/types.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace pmac {

enum class EventKind : std::uint8_t {
    Timer,
    FrameStart,
    FrameEnd,
    SlotBoundary,
    Arrival,
};

std::string_view to_string(EventKind kind);

struct EventHandle {
    std::uint64_t seq = 0;
    bool valid = false;
};

/// Single-threaded discrete-event engine. Events fire in ascending
/// (fire_at, seq) order, where seq is a global insertion counter.
class Kernel {
public:
    using Action = std::function<void()>;

    Kernel() = default;
    Kernel(const Kernel&) = delete;
    Kernel& operator=(const Kernel&) = delete;

    /// Throws FatalError when `at` lies before the current clock.
    EventHandle schedule(SimTime at, NodeId target, EventKind kind, Action action);
    EventHandle schedule_in(Duration delay, NodeId target, EventKind kind, Action action) {
        return schedule(now_ + delay, target, kind, std::move(action));
    }

    /// True iff the event had not fired yet and is now inert.
    bool cancel(EventHandle handle);
    bool pending(EventHandle handle) const;

    /// Processes every event with fire_at <= end, then sets the clock to end.
    /// Returns the number of events executed (cancelled ones excluded).
    std::uint64_t run_until(SimTime end);

    SimTime now() const { return now_; }
    std::size_t queued() const { return live_.size(); }
    std::uint64_t processed() const { return processed_; }

    /// Emits `time_us,seq,target,kind` per executed event; nullptr disables.
    void set_trace(std::ostream* out) { trace_ = out; }

private:
    struct Entry {
        SimTime at;
        std::uint64_t seq;
        NodeId target;
        EventKind kind;
        Action action;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            return a.at != b.at ? a.at > b.at : a.seq > b.seq;
        }
    };

    std::vector<Entry> heap_;
    std::unordered_set<std::uint64_t> live_;
    SimTime now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t processed_ = 0;
    std::ostream* trace_ = nullptr;
};

}  // namespace pmac
