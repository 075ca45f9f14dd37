#include "prioritymac/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

namespace pmac {

PacketId PacketLedger::add(Packet packet) {
    packet.id = static_cast<PacketId>(packets_.size());
    packets_.push_back(packet);
    return packet.id;
}

const Packet& PacketLedger::get(PacketId id) const {
    if (id >= packets_.size()) {
        throw FatalError("PacketLedger: unknown packet id " + std::to_string(id));
    }
    return packets_[id];
}

Packet& PacketLedger::at(PacketId id) {
    if (id >= packets_.size()) {
        throw FatalError("PacketLedger: unknown packet id " + std::to_string(id));
    }
    return packets_[id];
}

void PacketLedger::record_delivery(PacketId id, SimTime at_time) {
    Packet& p = at(id);
    if (p.finalized()) {
        throw FatalError("PacketLedger: packet " + std::to_string(id) + " finalized twice");
    }
    if (at_time <= p.generated_at) {
        throw FatalError("PacketLedger: packet " + std::to_string(id) + " received before it was generated");
    }
    p.delivered_at = at_time;
}

void PacketLedger::record_drop(PacketId id, DropReason reason, SimTime at_time) {
    Packet& p = at(id);
    if (p.finalized()) {
        throw FatalError("PacketLedger: packet " + std::to_string(id) + " finalized twice");
    }
    p.drop_reason = reason;
    p.dropped_at = at_time;
}

double ClassStats::loss_rate() const {
    return generated == 0 ? 0.0 : static_cast<double>(dropped()) / static_cast<double>(generated);
}

std::string_view to_string(Protocol p) { return p == Protocol::SsMac ? "ssmac" : "frogmac"; }

ClassStats aggregate_class(std::span<const Packet> packets, PriorityClass cls) {
    ClassStats s;
    std::vector<Duration> delays;
    for (const Packet& p : packets) {
        if (p.cls != cls) {
            continue;
        }
        ++s.generated;
        if (p.delivered_at) {
            ++s.delivered;
            delays.push_back(*p.delivered_at - p.generated_at);
        } else if (p.drop_reason) {
            switch (*p.drop_reason) {
                case DropReason::DeadlineExpired: ++s.dropped_deadline; break;
                case DropReason::RetryLimit: ++s.dropped_retry; break;
                case DropReason::QueueOverflow: ++s.dropped_overflow; break;
            }
        }
    }
    if (!delays.empty()) {
        std::sort(delays.begin(), delays.end());
        long double sum = 0;
        for (Duration d : delays) {
            sum += static_cast<long double>(d);
        }
        s.mean_delay_us = static_cast<double>(sum / static_cast<long double>(delays.size()));
        const std::size_t rank = (95 * delays.size() + 99) / 100;  // ceil(0.95 n)
        s.p95_delay_us = delays[rank - 1];
        s.max_delay_us = delays.back();
    }
    return s;
}

ScenarioResult aggregate(std::span<const Packet> packets, ScenarioKey key) {
    ScenarioResult r;
    r.key = std::move(key);
    r.per_class[index_of(PriorityClass::Urgent)] = aggregate_class(packets, PriorityClass::Urgent);
    r.per_class[index_of(PriorityClass::Normal)] = aggregate_class(packets, PriorityClass::Normal);
    return r;
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_rows(std::ostream& out, const ScenarioResult& result) {
    for (PriorityClass cls : {PriorityClass::Urgent, PriorityClass::Normal}) {
        const ClassStats& s = result.of(cls);
        out << result.key.scenario_id << ',' << to_string(result.key.protocol) << ',' << result.key.n_urgent
            << ',' << result.key.frag_size << ',' << result.key.seed << ',' << to_string(cls) << ','
            << s.generated << ',' << s.delivered << ',' << s.dropped_deadline << ',' << s.dropped_retry << ','
            << s.dropped_overflow << ',';
        if (s.mean_delay_us) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3f", *s.mean_delay_us);
            out << buf;
        }
        out << ',';
        if (s.p95_delay_us) {
            out << *s.p95_delay_us;
        }
        out << ',';
        if (s.max_delay_us) {
            out << *s.max_delay_us;
        }
        out << '\n';
    }
}

}  // namespace pmac
