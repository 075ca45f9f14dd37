#pragma once

#include "prioritymac/sim_kernel.hpp"
#include "prioritymac/types.hpp"

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pmac {

enum class FrameKind : std::uint8_t { Data, Fragment, Rts, Cts, Ack, EisInd, RrpReq, DspBcast };
inline constexpr std::size_t kFrameKindCount = 8;

std::string_view to_string(FrameKind kind);

/// One grant of the controller's channel allocation order.
struct CaoEntry {
    NodeId node = 0;
    SimTime deadline = 0;
    std::uint32_t rank = 0;

    friend bool operator==(const CaoEntry&, const CaoEntry&) = default;
};

struct Frame {
    FrameKind kind = FrameKind::Data;
    NodeId src = 0;
    NodeId dst = kBroadcast;
    std::uint32_t length_bytes = 1;
    std::optional<PacketId> packet;
    std::uint32_t frag_index = 0;
    std::uint32_t frag_count = 0;
    /// RRP_REQ: absolute deadline of the requesting packet.
    SimTime deadline = 0;
    /// Virtual carrier sense: the current exchange occupies the medium until
    /// nav_until; a fragmented transfer as a whole until reserve_until.
    SimTime nav_until = 0;
    SimTime reserve_until = 0;
    /// DSP_BCAST: grant table and start of the data transmission phase.
    std::vector<CaoEntry> cao;
    SimTime schedule_start = 0;
};

enum class CarrierState : std::uint8_t { Idle, Busy };

/// On-air sizes of the control frames. DSP_BCAST carries a header plus one
/// entry per grant.
struct FrameSizes {
    std::uint32_t control = 11;  // RTS, CTS, ACK, EIS_IND, RRP_REQ
    std::uint32_t dsp_header = 3;
    std::uint32_t dsp_per_grant = 2;

    std::uint32_t dsp_bytes(std::size_t grants) const {
        return dsp_header + dsp_per_grant * static_cast<std::uint32_t>(grants);
    }
};

struct ChannelConfig {
    Duration byte_time = 32;  // 250 kbit/s
    Duration propagation_delay = 0;
};

/// Receives channel callbacks for a set of attached nodes.
class ChannelListener {
public:
    virtual ~ChannelListener() = default;
    /// Intact delivery of `frame` to `receiver` at the frame's end time.
    virtual void on_frame(NodeId receiver, const Frame& frame, SimTime at) = 0;
    /// Medium transitions idle -> busy and busy -> idle.
    virtual void on_medium_busy(SimTime /*at*/) {}
    virtual void on_medium_idle(SimTime /*at*/) {}
};

struct TxRecord {
    std::uint64_t id = 0;
    NodeId src = 0;
    SimTime start = 0;
    SimTime end = 0;
    FrameKind kind = FrameKind::Data;
    bool intact = true;
};

struct ChannelStats {
    std::array<std::uint64_t, kFrameKindCount> sent{};
    std::array<std::uint64_t, kFrameKindCount> corrupted{};

    std::uint64_t sent_of(FrameKind k) const { return sent[static_cast<std::size_t>(k)]; }
    std::uint64_t corrupted_of(FrameKind k) const { return corrupted[static_cast<std::size_t>(k)]; }
};

/// Shared half-duplex broadcast medium of a single-hop star. A frame is
/// received intact by every other node iff no other transmission overlaps
/// its half-open interval [start, end).
class RadioChannel {
public:
    RadioChannel(Kernel& kernel, ChannelConfig config);

    void attach(ChannelListener* listener, std::vector<NodeId> nodes);

    Duration airtime(std::uint32_t length_bytes) const { return length_bytes * config_.byte_time; }
    Duration airtime(const Frame& frame) const { return airtime(frame.length_bytes); }

    /// Registers the transmission [at, at + airtime). `at` may be the current
    /// clock or a later instant. Returns the end time.
    SimTime transmit(NodeId src, Frame frame, SimTime at);
    SimTime transmit(NodeId src, Frame frame) { return transmit(src, std::move(frame), kernel_.now()); }

    /// Busy iff another node's transmission interval contains `at`.
    CarrierState carrier_sense(NodeId node, SimTime at) const;
    CarrierState carrier_sense(NodeId node) const { return carrier_sense(node, kernel_.now()); }

    /// Energy detection over [from, to): true iff at least one EIS_IND
    /// transmission overlapped the window, however many collided.
    bool or_channel_sense(NodeId controller, SimTime from, SimTime to) const;

    bool transmitting(NodeId node) const;

    const ChannelStats& stats() const { return stats_; }
    const ChannelConfig& config() const { return config_; }

    /// Keeps the verdict of every finished transmission (tests, oracles).
    void record_history(bool enabled) { record_ = enabled; }
    const std::vector<TxRecord>& history() const { return history_; }

private:
    struct Active {
        TxRecord record;
        Frame frame;
    };

    void start(NodeId src, Frame frame, SimTime at);
    void finish(std::uint64_t id);
    bool busy_at(SimTime at, NodeId exclude) const;

    Kernel& kernel_;
    ChannelConfig config_;
    std::vector<std::pair<ChannelListener*, std::vector<NodeId>>> listeners_;
    std::unordered_map<std::uint64_t, Active> active_;
    std::unordered_map<NodeId, SimTime> booked_until_;
    std::deque<std::pair<SimTime, SimTime>> eis_windows_;
    std::vector<TxRecord> history_;
    ChannelStats stats_;
    std::uint64_t next_id_ = 0;
    bool record_ = false;
};

}  // namespace pmac
