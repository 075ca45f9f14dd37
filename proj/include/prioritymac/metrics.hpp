#pragma once

#include "prioritymac/traffic.hpp"
#include "prioritymac/types.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pmac {

/// Owns every packet of a run and closes each lifecycle exactly once.
class PacketLedger {
public:
    PacketId add(Packet packet);

    const Packet& get(PacketId id) const;
    bool finalized(PacketId id) const { return get(id).finalized(); }
    bool delivered(PacketId id) const { return get(id).delivered_at.has_value(); }

    /// Reception at the sink. Throws FatalError on a second finalization or
    /// a non-positive delay.
    void record_delivery(PacketId id, SimTime at);
    void record_drop(PacketId id, DropReason reason, SimTime at);

    std::span<const Packet> packets() const { return packets_; }
    std::size_t size() const { return packets_.size(); }

private:
    Packet& at(PacketId id);
    std::vector<Packet> packets_;
};

struct ClassStats {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped_deadline = 0;
    std::uint64_t dropped_retry = 0;
    std::uint64_t dropped_overflow = 0;
    /// Absent when nothing was delivered.
    std::optional<double> mean_delay_us;
    std::optional<Duration> p95_delay_us;
    std::optional<Duration> max_delay_us;

    std::uint64_t dropped() const { return dropped_deadline + dropped_retry + dropped_overflow; }
    std::uint64_t residual() const { return generated - delivered - dropped(); }
    /// dropped / generated; 0 when nothing was generated.
    double loss_rate() const;
};

enum class Protocol : std::uint8_t { SsMac, FrogMac };
std::string_view to_string(Protocol p);

struct ScenarioKey {
    std::string scenario_id;
    Protocol protocol = Protocol::SsMac;
    std::uint32_t n_urgent = 0;
    std::uint32_t frag_size = 0;
    std::uint64_t seed = 0;
};

struct ScenarioResult {
    ScenarioKey key;
    std::array<ClassStats, kClassCount> per_class{};

    const ClassStats& of(PriorityClass c) const { return per_class[index_of(c)]; }
};

/// Delay samples and counters for one class. p95 uses the nearest-rank
/// definition: the ceil(0.95 n)-th smallest sample.
ClassStats aggregate_class(std::span<const Packet> packets, PriorityClass cls);
ScenarioResult aggregate(std::span<const Packet> packets, ScenarioKey key);

/// Column order is fixed; delay fields are empty when absent.
inline constexpr std::string_view kCsvHeader =
    "scenario_id,protocol,n_urgent,frag_size,seed,class,generated,delivered,dropped_deadline,"
    "dropped_retry,dropped_overflow,mean_delay_us,p95_delay_us,max_delay_us";

void write_csv_header(std::ostream& out);
/// One row per class, urgent first.
void write_csv_rows(std::ostream& out, const ScenarioResult& result);

}  // namespace pmac
