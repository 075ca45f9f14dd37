#include "prioritymac/scenario.hpp"
#include "world.hpp"

#include <doctest.h>

using namespace pmac;

namespace {

struct Sensing : ChannelListener {
    void on_frame(NodeId, const Frame&, SimTime) override {}
};

}  // namespace

TEST_CASE("carrier sense is the same at every non-transmitting node") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        RngStream rng(seed, 3);
        Kernel k;
        RadioChannel ch(k, {});
        Sensing s;
        ch.attach(&s, {0, 1, 2, 3, 4, 5, 6});
        std::vector<std::pair<SimTime, SimTime>> tx;
        for (NodeId n = 1; n <= 6; ++n) {
            Frame f;
            f.length_bytes = 1 + static_cast<std::uint32_t>(rng.uniform(40));
            const SimTime at = rng.uniform(5000);
            tx.emplace_back(at, at + 32 * f.length_bytes);
            ch.transmit(n, f, at);
        }
        bool consistent = true;
        for (int probe = 0; probe < 50; ++probe) {
            const SimTime at = rng.uniform(7000);
            k.run_until(std::max(k.now(), at));
            if (k.now() != at) {
                continue;
            }
            const auto sink = ch.carrier_sense(0);
            for (NodeId n = 1; n <= 6; ++n) {
                const bool own = tx[n - 1].first <= at && at < tx[n - 1].second;
                bool others = false;
                for (NodeId m = 1; m <= 6; ++m) {
                    others = others || (m != n && tx[m - 1].first <= at && at < tx[m - 1].second);
                }
                if (!own) {
                    consistent = consistent && ch.carrier_sense(n) == sink;
                }
                consistent = consistent && (ch.carrier_sense(n) == CarrierState::Busy) == others;
            }
        }
        CHECK(consistent);
    }
}

TEST_CASE("normal packets are never served while urgent ones wait") {
    RngStream rng(8, 8);
    for (int trial = 0; trial < 200; ++trial) {
        TxQueue q(4);
        PacketId id = 0;
        for (int op = 0; op < 50; ++op) {
            const auto r = rng.uniform(3);
            if (r == 0) {
                q.push(PriorityClass::Urgent, id++);
            } else if (r == 1) {
                q.push(PriorityClass::Normal, id++);
            } else if (auto next = q.next()) {
                CHECK((next->first == PriorityClass::Urgent || q.empty(PriorityClass::Urgent)));
                q.pop(next->first);
            }
            CHECK(q.size(PriorityClass::Urgent) <= 4);
            CHECK(q.size(PriorityClass::Normal) <= 4);
        }
    }
}

TEST_CASE("random scenarios conserve packets and keep SS-MAC DATA collision-free") {
    RngStream rng(21, 0);
    for (int trial = 0; trial < 24; ++trial) {
        Scenario s;
        s.protocol = trial % 2 == 0 ? Protocol::SsMac : Protocol::FrogMac;
        s.duration = 120 * kSecond;
        s.n_urgent = static_cast<std::uint32_t>(rng.uniform(20));
        s.n_normal_only = static_cast<std::uint32_t>(rng.uniform(20 - s.n_urgent));
        s.traffic.urgent_interval = (1 + rng.uniform(4)) * kSecond;
        s.traffic.normal_interval = (1 + rng.uniform(10)) * kSecond;
        s.traffic.urgent_deadline = (5 + rng.uniform(100)) * kMillisecond;
        s.traffic.queue_capacity = 1 + rng.uniform(5);
        s.frog.frag_size = 2 + static_cast<std::uint32_t>(rng.uniform(33));
        s.superframe.eis_per_slot = rng.uniform(4) == 0;
        const auto run = run_scenario(s, trial);
        CHECK(run.conserved);
        for (auto cls : {PriorityClass::Urgent, PriorityClass::Normal}) {
            const auto& c = run.result.of(cls);
            CHECK(c.generated == c.delivered + c.dropped() + c.residual());
            CHECK(c.residual() <= (s.n_urgent + s.n_normal_only) * s.traffic.queue_capacity);
        }
        for (const Packet& p : run.packets) {
            if (p.delivered_at) {
                CHECK(*p.delivered_at > p.generated_at);
            }
        }
        if (s.protocol == Protocol::SsMac) {
            CHECK(run.channel.corrupted_of(FrameKind::Data) == 0);
            CHECK(run.channel.corrupted_of(FrameKind::Ack) == 0);
            CHECK(run.channel.corrupted_of(FrameKind::RrpReq) == 0);
            CHECK(run.ss->lower_bound_checks == run.result.of(PriorityClass::Urgent).delivered);
        } else if (s.frog.frag_size < s.traffic.packet_length) {
            CHECK(run.frog->reassembled == run.result.of(PriorityClass::Normal).delivered);
        }
    }
}

TEST_CASE("urgent wait behind a fragmented transfer is bounded by one fragment exchange") {
    RngStream rng(4, 4);
    for (int trial = 0; trial < 300; ++trial) {
        const std::uint32_t frag = 2 + static_cast<std::uint32_t>(rng.uniform(33));
        FrogParams p;
        p.frag_size = frag;
        World w(3);
        FrogMac mac(w.ctx(), w.roles, 10, p, FrameSizes{}, trial);
        w.attach(mac);
        const auto normal = w.inject(mac, 1, PriorityClass::Normal, 0);
        const SimTime at = rng.uniform(40'000);
        const auto urgent = w.inject(mac, 2, PriorityClass::Urgent, at);
        w.kernel.run_until(kSecond);
        const auto& u = w.packet(urgent);
        REQUIRE(u.delivered_at.has_value());
        CHECK(w.packet(normal).delivered_at.has_value());
        const Duration handshake = 352 + p.sifs + 352 + p.sifs;
        const Duration fragment = 32 * fragment_packet(34, frag).frame_bytes(0) + p.sifs + 352 + p.gap_frag;
        const Duration contention = p.ifs_urgent + (p.cw_min - 1) * p.backoff_slot;
        CHECK(*u.delivered_at - u.generated_at <= handshake + fragment + contention + handshake + 1088);
    }
}
