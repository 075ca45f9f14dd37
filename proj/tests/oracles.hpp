#pragma once

// Naive reference implementations, independent of the library code.

#include "prioritymac/metrics.hpp"
#include "prioritymac/radio_channel.hpp"
#include "prioritymac/rng.hpp"
#include "prioritymac/sim_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

using namespace pmac;

/// Schedules `count` events at random times into a fresh kernel and returns
/// the number of positions where the executed order differs from sorting the
/// (fire_at, seq) pairs.
inline std::size_t kernel_order_mismatches(std::uint64_t seed, std::size_t count) {
    RngStream rng(seed, 0xA11CE);
    Kernel kernel;
    std::vector<std::pair<SimTime, std::uint64_t>> expected;
    std::vector<std::uint64_t> fired;
    expected.reserve(count);
    fired.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        // narrow time range so ties are frequent
        const SimTime at = rng.uniform(count / 4 + 1);
        expected.emplace_back(at, i);
        kernel.schedule(at, 0, EventKind::Timer, [&fired, i] { fired.push_back(i); });
    }
    std::sort(expected.begin(), expected.end());
    kernel.run_until(count);
    std::size_t mismatches = fired.size() == expected.size() ? 0 : 1;
    for (std::size_t i = 0; i < std::min(fired.size(), expected.size()); ++i) {
        if (fired[i] != expected[i].second) {
            ++mismatches;
        }
    }
    return mismatches;
}

struct Interval {
    SimTime start;
    SimTime end;
};

/// Intact iff no other interval overlaps [start, end).
inline std::vector<bool> overlap_verdicts(const std::vector<Interval>& tx) {
    std::vector<bool> intact(tx.size(), true);
    for (std::size_t i = 0; i < tx.size(); ++i) {
        for (std::size_t j = 0; j < tx.size(); ++j) {
            if (i != j && tx[i].start < tx[j].end && tx[j].start < tx[i].end) {
                intact[i] = false;
            }
        }
    }
    return intact;
}

struct DeliveryLog : ChannelListener {
    std::vector<std::pair<NodeId, NodeId>> got;  // receiver, source
    void on_frame(NodeId receiver, const Frame& f, SimTime) override { got.emplace_back(receiver, f.src); }
};

/// Random transmission set on a star with one extra listen-only node; counts
/// frames whose channel verdict or reception disagrees with the oracle.
inline std::size_t channel_verdict_mismatches(std::uint64_t seed) {
    RngStream rng(seed, 77);
    const std::size_t n = 2 + rng.uniform(30);
    Kernel k;
    RadioChannel ch(k, {});
    ch.record_history(true);
    DeliveryLog log;
    std::vector<NodeId> nodes;
    for (NodeId i = 0; i <= n; ++i) {
        nodes.push_back(i);
    }
    ch.attach(&log, nodes);
    std::vector<Interval> tx;
    for (NodeId i = 0; i < n; ++i) {
        const SimTime at = rng.uniform(20'000);
        Frame f;
        f.length_bytes = 1 + static_cast<std::uint32_t>(rng.uniform(40));
        ch.transmit(i, f, at);
        tx.push_back({at, at + f.length_bytes * ch.config().byte_time});
    }
    k.run_until(50'000);
    const auto expect = overlap_verdicts(tx);
    std::vector<std::size_t> receptions(n, 0);
    for (const auto& [rx, src] : log.got) {
        ++receptions[src];
    }
    std::size_t mismatches = ch.history().size() == n ? 0 : 1;
    for (const TxRecord& rec : ch.history()) {
        const bool intact = expect[rec.src];
        if (rec.intact != intact || receptions[rec.src] != (intact ? n : 0)) {
            ++mismatches;
        }
    }
    return mismatches;
}

/// Plain single pass over the records for one class.
struct NaiveStats {
    std::uint64_t generated = 0, delivered = 0, deadline = 0, retry = 0, overflow = 0;
    double mean = 0;
    std::uint64_t p95 = 0, max = 0;
};

inline NaiveStats naive_aggregate(const std::vector<Packet>& packets, PriorityClass cls) {
    NaiveStats s;
    std::vector<std::uint64_t> delays;
    long double sum = 0;
    for (const Packet& p : packets) {
        if (p.cls != cls) {
            continue;
        }
        ++s.generated;
        if (p.delivered_at) {
            ++s.delivered;
            const std::uint64_t d = *p.delivered_at - p.generated_at;
            delays.push_back(d);
            sum += d;
            s.max = std::max(s.max, d);
        } else if (p.drop_reason == DropReason::DeadlineExpired) {
            ++s.deadline;
        } else if (p.drop_reason == DropReason::RetryLimit) {
            ++s.retry;
        } else if (p.drop_reason == DropReason::QueueOverflow) {
            ++s.overflow;
        }
    }
    if (!delays.empty()) {
        s.mean = static_cast<double>(sum / delays.size());
        std::sort(delays.begin(), delays.end());
        // nearest rank: smallest value with at least 95% of samples at or below it
        for (std::size_t r = 1; r <= delays.size(); ++r) {
            if (100 * r >= 95 * delays.size()) {
                s.p95 = delays[r - 1];
                break;
            }
        }
    }
    return s;
}

/// Random finalized and open packet records for both classes.
inline std::vector<Packet> random_records(std::uint64_t seed, std::size_t count) {
    RngStream rng(seed, 0xBEEF);
    std::vector<Packet> out;
    for (std::size_t i = 0; i < count; ++i) {
        Packet p;
        p.id = i;
        p.cls = rng.uniform(2) == 0 ? PriorityClass::Urgent : PriorityClass::Normal;
        p.src = 1 + static_cast<NodeId>(rng.uniform(19));
        p.generated_at = rng.uniform(5'000'000'000ULL);
        switch (rng.uniform(5)) {
            case 0: p.drop_reason = DropReason::DeadlineExpired; break;
            case 1: p.drop_reason = DropReason::RetryLimit; break;
            case 2: p.drop_reason = DropReason::QueueOverflow; break;
            case 3: break;
            default: p.delivered_at = p.generated_at + 1 + rng.uniform(200'000);
        }
        out.push_back(p);
    }
    return out;
}

/// Fragment sizes by ceiling arithmetic.
inline std::vector<std::uint32_t> ceiling_plan(std::uint32_t length, std::uint32_t frag) {
    const std::uint32_t count = (length + frag - 1) / frag;
    std::vector<std::uint32_t> v(count, frag);
    v.back() = length - frag * (count - 1);
    return v;
}

}  // namespace oracle
