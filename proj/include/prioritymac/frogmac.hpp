#pragma once

#include "prioritymac/mac_api.hpp"
#include "prioritymac/rng.hpp"

#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace pmac {

struct FrogParams {
    std::uint32_t frag_size = 16;
    std::uint32_t header_bytes = 5;
    Duration sifs = 192;
    Duration ifs_urgent = 192;
    Duration ifs_normal = 640;
    /// ifs_normal + (cw_min - 1) backoff slots, so a fresh urgent contender
    /// always reaches its RTS inside the gap.
    Duration gap_frag = 2880;
    Duration backoff_slot = 320;
    std::uint32_t cw_min = 8;
    std::uint32_t cw_max = 64;
    std::uint32_t retry_limit = 5;
    /// Measured from the end of the frame that expects a CTS or ACK.
    Duration ack_timeout = 736;
    /// Every backoff draw returns this value when set.
    std::optional<std::uint32_t> forced_backoff;

    /// Throws ConfigError on inconsistent values, including a gap too short
    /// for an urgent RTS to preempt the next fragment.
    void validate(std::uint32_t packet_length) const;
};

struct FragmentPlan {
    PacketId parent = 0;
    std::vector<std::uint32_t> payloads;
    std::uint32_t header_bytes = 5;

    std::size_t count() const { return payloads.size(); }
    std::uint32_t total_payload() const;
    /// On-air size of fragment i. A one-fragment plan travels as plain DATA
    /// without a fragment header.
    std::uint32_t frame_bytes(std::size_t i) const;
};

/// ceil(length / frag_size) fragments, all frag_size except a shorter tail.
FragmentPlan fragment_packet(std::uint32_t length, std::uint32_t frag_size, std::uint32_t header_bytes = 5,
                             PacketId parent = 0);

struct Contender {
    NodeId node = 0;
    std::uint32_t backoff_slots = 0;
};

struct RaceOutcome {
    std::optional<NodeId> winner;
    /// Contenders whose RTS start together and destroy each other.
    std::vector<NodeId> collided;
    SimTime rts_at = 0;
    /// The first RTS starts before the gap closes.
    bool within_gap = false;
};

/// Urgent contenders that all start counting when an inter-fragment gap
/// opens at `gap_start`: the earliest backoff expiry wins; equal earliest
/// expiries collide.
RaceOutcome preemption_race(std::span<const Contender> contenders, SimTime gap_start, const FrogParams& params);

class FrogMac final : public MacProtocol {
public:
    enum class NodeState : std::uint8_t {
        Idle,
        Backoff,
        SentRts,
        AwaitCts,
        TxData,
        TxFragment,
        AwaitAck,
        GapWait,
        Suspended,
    };

    using BackoffSource = std::function<std::uint32_t(NodeId node, std::uint32_t cw)>;

    struct Stats {
        std::uint64_t rts_sent = 0;
        std::uint64_t cts_timeouts = 0;
        std::uint64_t ack_timeouts = 0;
        std::uint64_t gaps = 0;
        std::uint64_t gap_checks = 0;
        std::uint64_t preemptions = 0;
        std::uint64_t fragments_sent = 0;
        std::uint64_t fragments_in_order = 0;
        std::uint64_t duplicate_fragments = 0;
        std::uint64_t reassembled = 0;
    };

    FrogMac(MacContext ctx, std::vector<NodeRole> roles, std::size_t queue_capacity, FrogParams params,
            FrameSizes sizes, std::uint64_t seed);

    std::string_view name() const override { return "frogmac"; }
    void start() override {}

    void set_backoff_source(BackoffSource source) { backoff_source_ = std::move(source); }

    const FrogParams& params() const { return params_; }
    NodeState state(NodeId node) const { return nodes_.at(node).state; }
    std::uint32_t contention_window(NodeId node) const;
    const Stats& stats() const { return stats_; }

    void on_medium_busy(SimTime at) override;
    void on_medium_idle(SimTime at) override;

protected:
    void on_frame_received(NodeId node, const Frame& frame, SimTime at) override;
    void on_enqueued(NodeId node, PriorityClass cls, PacketId packet) override;

private:
    struct Job {
        PacketId packet = 0;
        PriorityClass cls = PriorityClass::Normal;
        FragmentPlan plan;
        std::size_t cursor = 0;
        std::uint32_t retries = 0;
        std::uint32_t cw = 8;
        bool data_in_flight = false;
    };

    struct NodeCtx {
        NodeState state = NodeState::Idle;
        std::optional<Job> active;
        std::optional<Job> suspended;
        bool contending = false;
        Duration ifs = 0;
        std::uint32_t backoff_left = 0;
        SimTime countdown_start = 0;
        SimTime access_expiry = 0;
        EventHandle access_timer;
        EventHandle nav_timer;
        EventHandle response_timer;
        EventHandle gap_timer;
        SimTime nav_until = 0;
        SimTime reserve_until = 0;
        SimTime own_tx_end = 0;
        std::optional<NodeId> gap_watch;
    };

    struct Reassembly {
        PacketId packet = 0;
        std::uint32_t next = 0;
        bool open = false;
    };

    void set_state(NodeId node, NodeState next);
    Job make_job(NodeId node, PriorityClass cls, PacketId packet) const;
    bool select_job(NodeId node);
    void begin_access(NodeId node);
    void try_countdown(NodeId node);
    void stop_contending(NodeCtx& n);
    void on_access(NodeId node);
    void send_unit(NodeId node, Duration lead);
    void on_cts(NodeId node);
    void on_ack(NodeId node);
    void on_gap_end(NodeId node);
    void on_timeout(NodeId node);
    void on_deadline(NodeId node, PacketId packet);
    void finish_job(NodeId node);
    void abandon_job(NodeId node, DropReason reason);
    void suspend_active(NodeId node);
    std::optional<NodeId> lone_urgent_contender(NodeId holder) const;
    Duration unit_airtime(const Job& job) const;
    Duration remaining_duration(const Job& job) const;
    std::uint32_t draw_backoff(NodeId node, std::uint32_t cw);
    void sink_receive(const Frame& frame, SimTime at);
    void sink_respond(FrameKind kind, const Frame& to, SimTime at);

    FrogParams params_;
    FrameSizes sizes_;
    std::vector<NodeCtx> nodes_;
    std::vector<RngStream> rngs_;
    BackoffSource backoff_source_;
    std::unordered_map<NodeId, Reassembly> reassembly_;
    SimTime sink_busy_until_ = 0;
    Stats stats_;
};

}  // namespace pmac
