#pragma once

#include "prioritymac/mac_api.hpp"

#include <span>
#include <unordered_map>
#include <vector>

namespace pmac {

/// Timing of the synchronous superframe. Slot and subslot counts are filled
/// in from the scenario's node layout.
struct SuperframeConfig {
    Duration nc_slot = 2000;  // DATA 1088 + ACK 352 + 2 x SIFS 384 + guard 176
    std::size_t nc_slot_count = 0;
    Duration eis = 352;
    Duration rrp_subslot = 352;
    std::size_t rrp_subslot_count = 0;
    Duration dsp = 1000;
    Duration sifs = 192;
    std::uint32_t data_bytes = 34;
    /// Place an EIS after every non-critical slot instead of once per cycle.
    bool eis_per_slot = false;

    /// Length of one undisturbed non-critical cycle including its EIS windows.
    Duration cycle_length() const;
    Duration rrp_total() const { return rrp_subslot * rrp_subslot_count; }
};

enum class GridItemKind : std::uint8_t { NcSlot, Eis };

struct GridItem {
    GridItemKind kind = GridItemKind::NcSlot;
    std::size_t slot = 0;  // owning slot index (NcSlot) or preceding slot (Eis)
    SimTime at = 0;
};

/// The periodic layout of non-critical slots and EIS windows, anchored at the
/// start of a cycle. Inserting a critical cycle shifts the anchor.
class SuperframeGrid {
public:
    explicit SuperframeGrid(const SuperframeConfig& config);

    /// First item starting at or after `t`, for a grid whose cycle 0 starts at
    /// `anchor` (t >= anchor).
    GridItem next_item(SimTime anchor, SimTime t) const;
    /// Start of the first EIS window at or after `t`.
    SimTime next_eis(SimTime anchor, SimTime t) const;

    Duration period() const { return period_; }

private:
    struct Offset {
        Duration offset;
        GridItemKind kind;
        std::size_t slot;
    };
    std::vector<Offset> items_;
    std::vector<Duration> eis_offsets_;
    Duration period_ = 0;
};

/// Time from `arrival` until the next EIS window opens, given the start of
/// the current (possibly shifted) cycle.
Duration next_eis_wait(SimTime arrival, const SuperframeConfig& config, SimTime cycle_start = 0);

struct RrpRequest {
    NodeId node = 0;
    SimTime deadline = 0;
};

using CaoTable = std::vector<CaoEntry>;

/// Ranks requests by ascending deadline, ties by ascending node id; rank i
/// transmits in the i-th DTP slot.
CaoTable assign_cao(std::span<const RrpRequest> requests);

/// Ranks form 1..k in table order and deadlines never decrease with rank.
bool is_valid_cao(const CaoTable& table);

class SsMac final : public MacProtocol {
public:
    enum class NodeState : std::uint8_t { Idle, AwaitEis, SentInd, AwaitCao, AwaitDtp, TxData };
    enum class Phase : std::uint8_t { NcCycle, EisWindow, Rrp, Dsp, Dtp };

    struct Layout {
        /// Owners of the non-critical slots, in slot order.
        std::vector<NodeId> nc_owners;
        /// Urgent-capable nodes, in RRP subslot order.
        std::vector<NodeId> urgent_nodes;
    };

    struct Stats {
        std::uint64_t critical_cycles = 0;
        std::uint64_t cao_tables = 0;
        std::uint64_t grants = 0;
        std::uint64_t empty_dtp_slots = 0;
        std::uint64_t lower_bound_checks = 0;
        /// Generation to the first EIS window that opened afterwards.
        std::vector<Duration> eis_waits;
    };

    SsMac(MacContext ctx, std::vector<NodeRole> roles, std::size_t queue_capacity, SuperframeConfig timing,
          FrameSizes sizes, Layout layout);

    std::string_view name() const override { return "ssmac"; }
    void start() override;

    const SuperframeConfig& timing() const { return timing_; }
    NodeState state(NodeId node) const { return nodes_.at(node).state; }
    Phase phase() const { return phase_; }
    const Stats& stats() const { return stats_; }

protected:
    void on_frame_received(NodeId node, const Frame& frame, SimTime at) override;
    void on_enqueued(NodeId node, PriorityClass cls, PacketId packet) override;

private:
    struct NodeCtx {
        NodeState state = NodeState::Idle;
        std::optional<PacketId> requested;
        std::optional<PacketId> granted;
        std::size_t rrp_index = 0;
        bool urgent_capable = false;
    };

    bool interesting(const GridItem& item) const;
    bool any_urgent_pending() const;
    void reschedule(SimTime from);
    void on_item(const GridItem& item);
    void send_normal(NodeId owner);
    void begin_eis(SimTime t);
    void indicate(NodeId node);
    void end_eis();
    void begin_rrp(SimTime t);
    void rrp_subslot(NodeId node);
    void begin_dsp();
    void dtp_slot(NodeId node, PacketId packet);
    void end_critical();
    void on_deadline(NodeId node, PacketId packet);
    void settle(NodeId node);
    void sink_receive(const Frame& frame, SimTime at);
    void sensor_receive(NodeId node, const Frame& frame);

    SuperframeConfig timing_;
    FrameSizes sizes_;
    Layout layout_;
    SuperframeGrid grid_;
    std::vector<NodeCtx> nodes_;

    Phase phase_ = Phase::NcCycle;
    SimTime anchor_ = 0;
    std::optional<SimTime> last_item_;
    EventHandle boundary_;
    SimTime eis_start_ = 0;
    SimTime rrp_start_ = 0;
    std::vector<RrpRequest> requests_;
    std::vector<PacketId> awaiting_first_eis_;
    std::unordered_map<PacketId, SimTime> first_eis_;
    Stats stats_;
};

}  // namespace pmac
