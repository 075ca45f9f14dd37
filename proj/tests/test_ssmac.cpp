#include "world.hpp"

#include <doctest.h>

using namespace pmac;

namespace {

SuperframeConfig nineteen_slots() {
    SuperframeConfig c;
    c.nc_slot_count = 19;
    return c;
}

struct Star {
    World w;
    SsMac mac;
    // sensors 1..3 own NC slots 0..2 and RRP subslots 0..2; cycle 6352 us,
    // first EIS at 6000
    explicit Star(std::size_t nodes = 4)
        : w(nodes), mac(w.ctx(), w.roles, 10, SuperframeConfig{}, FrameSizes{}, layout(nodes)) {
        w.attach(mac);
        mac.start();
    }
    static SsMac::Layout layout(std::size_t nodes) {
        SsMac::Layout l;
        for (NodeId n = 1; n < nodes; ++n) {
            l.nc_owners.push_back(n);
            l.urgent_nodes.push_back(n);
        }
        return l;
    }
    Duration delay(std::size_t id) const { return *w.packet(id).delivered_at - w.packet(id).generated_at; }
};

}  // namespace

TEST_CASE("wait to the next EIS") {
    const auto c = nineteen_slots();
    CHECK(c.cycle_length() == 38'352);
    CHECK(next_eis_wait(38'000, c) == 0);
    CHECK(next_eis_wait(0, c) == 38'000);
    CHECK(next_eis_wait(38'001, c) == 38'351);
    CHECK(next_eis_wait(1000 + 38'000, c, 1000) == 0);
}

TEST_CASE("EIS after every slot") {
    SuperframeConfig c;
    c.nc_slot_count = 3;
    c.eis_per_slot = true;
    CHECK(c.cycle_length() == 3 * 2352);
    CHECK(next_eis_wait(0, c) == 2000);
    CHECK(next_eis_wait(2001, c) == 2351);
    CHECK(next_eis_wait(2352, c) == 2000);
}

TEST_CASE("mean wait to EIS is half a cycle") {
    const auto c = nineteen_slots();
    RngStream rng(11, 0);
    const SimTime span = 1000 * c.cycle_length();
    double sum = 0;
    const int samples = 200'000;
    for (int i = 0; i < samples; ++i) {
        sum += static_cast<double>(next_eis_wait(rng.uniform(span), c));
    }
    const double half = c.cycle_length() / 2.0;
    CHECK(std::abs(sum / samples - half) / half < 0.02);
}

TEST_CASE("CAO ranks by deadline, then node id") {
    const std::vector<RrpRequest> a{{3, 150 * kMillisecond}, {7, 90 * kMillisecond}};
    const auto ta = assign_cao(a);
    CHECK(ta == CaoTable{{7, 90 * kMillisecond, 1}, {3, 150 * kMillisecond, 2}});
    const std::vector<RrpRequest> b{{9, 50}, {4, 50}};
    const auto tb = assign_cao(b);
    CHECK(tb == CaoTable{{4, 50, 1}, {9, 50, 2}});
    const std::vector<RrpRequest> c{{5, 1}};
    CHECK(assign_cao(c) == CaoTable{{5, 1, 1}});
    CHECK(is_valid_cao(ta));
    CHECK_FALSE(is_valid_cao(CaoTable{{3, 150, 1}, {7, 90, 2}}));
    CHECK_FALSE(is_valid_cao(CaoTable{{3, 90, 2}}));
}

TEST_CASE("CAO tables from random requests are valid permutations") {
    RngStream rng(5, 5);
    for (int t = 0; t < 500; ++t) {
        std::vector<RrpRequest> req;
        const auto k = 1 + rng.uniform(19);
        for (NodeId n = 1; n <= k; ++n) {
            req.push_back({n, rng.uniform(4)});
        }
        const auto table = assign_cao(req);
        CHECK(is_valid_cao(table));
        CHECK(table.size() == req.size());
    }
}

TEST_CASE("non-critical cycle runs collision-free and without indications") {
    Star s;
    const auto id = s.w.inject(s.mac, 3, PriorityClass::Normal, 5000);
    s.w.kernel.run_until(20'000);
    CHECK(*s.w.packet(id).delivered_at == 6352 + 4000 + 1088);
    CHECK(s.mac.stats().critical_cycles == 0);
    CHECK(s.w.collisions(FrameKind::Data) == 0);
}

TEST_CASE("an indication inserts a critical cycle and shifts the schedule") {
    Star s;
    const auto normal = s.w.inject(s.mac, 3, PriorityClass::Normal, 5000);
    const auto urgent = s.w.inject(s.mac, 1, PriorityClass::Urgent, 100);
    s.w.kernel.run_until(30'000);
    // RRP 3 x 352, DSP 1000, one DTP slot
    CHECK(*s.w.packet(urgent).delivered_at == 6352 + 1056 + 1000 + 1088);
    CHECK(*s.w.packet(normal).delivered_at == 6352 + 4056 + 4000 + 1088);
    CHECK(s.mac.stats().critical_cycles == 1);
    CHECK(s.mac.stats().lower_bound_checks == 1);
}

TEST_CASE("simultaneous indications open a single critical cycle") {
    Star s;
    std::vector<std::size_t> ids;
    for (NodeId n = 1; n <= 3; ++n) {
        ids.push_back(s.w.inject(s.mac, n, PriorityClass::Urgent, 100, (90 + n) * kMillisecond));
    }
    s.w.kernel.run_until(30'000);
    CHECK(s.mac.stats().critical_cycles == 1);
    CHECK(s.mac.stats().grants == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(*s.w.packet(ids[i]).delivered_at == 6352 + 1056 + 1000 + i * 2000 + 1088);
    }
    CHECK(s.w.collisions(FrameKind::EisInd) == 3);
    CHECK(s.w.collisions(FrameKind::Data) == 0);
}

TEST_CASE("grants follow deadlines, not node ids") {
    Star s;
    const auto late = s.w.inject(s.mac, 1, PriorityClass::Urgent, 100, 90 * kMillisecond);
    const auto early = s.w.inject(s.mac, 3, PriorityClass::Urgent, 100, 50 * kMillisecond);
    s.w.kernel.run_until(30'000);
    CHECK(*s.w.packet(early).delivered_at < *s.w.packet(late).delivered_at);
}

TEST_CASE("a grant whose deadline passes before its slot leaves the slot empty") {
    Star s;
    const auto first = s.w.inject(s.mac, 1, PriorityClass::Urgent, 100, 9500);
    const auto second = s.w.inject(s.mac, 2, PriorityClass::Urgent, 100, 9900);
    s.w.kernel.run_until(30'000);
    CHECK(*s.w.packet(first).delivered_at == 9496);
    CHECK(s.w.packet(second).drop_reason == DropReason::DeadlineExpired);
    CHECK(*s.w.packet(second).dropped_at == 10'000);
    CHECK(s.mac.stats().empty_dtp_slots == 1);
}

TEST_CASE("a request that expires before its subslot leaves an empty grant list") {
    Star s;
    const auto gone = s.w.inject(s.mac, 3, PriorityClass::Urgent, 5900, 900);
    const auto normal = s.w.inject(s.mac, 3, PriorityClass::Normal, 5000);
    s.w.kernel.run_until(30'000);
    CHECK(s.w.packet(gone).drop_reason == DropReason::DeadlineExpired);
    CHECK(s.mac.stats().critical_cycles == 1);
    CHECK(s.mac.stats().grants == 0);
    CHECK(*s.w.packet(normal).delivered_at == 6352 + 1056 + 1000 + 4000 + 1088);
}

TEST_CASE("only the queue head is requested per critical cycle") {
    Star s;
    const auto a = s.w.inject(s.mac, 1, PriorityClass::Urgent, 100);
    const auto b = s.w.inject(s.mac, 1, PriorityClass::Urgent, 200);
    s.w.kernel.run_until(60'000);
    CHECK(s.mac.stats().cao_tables == 2);
    CHECK(s.mac.stats().grants == 2);
    CHECK(*s.w.packet(a).delivered_at < *s.w.packet(b).delivered_at);
}

TEST_CASE("worst-case arrival pays a full cycle") {
    Star s;
    const auto id = s.w.inject(s.mac, 1, PriorityClass::Urgent, 6001);
    s.w.kernel.run_until(40'000);
    const auto& t = s.mac.timing();
    CHECK(s.delay(id) == (t.cycle_length() - 1) + t.eis + t.rrp_total() + t.dsp + 1088);
}

TEST_CASE("an urgent packet waiting for EIS does not use its own NC slot") {
    Star alone;
    const auto n0 = alone.w.inject(alone.mac, 1, PriorityClass::Normal, 6100);
    alone.w.kernel.run_until(40'000);
    CHECK(*alone.w.packet(n0).delivered_at == 6352 + 1088);

    Star s;
    const auto n1 = s.w.inject(s.mac, 1, PriorityClass::Normal, 6100);
    const auto u = s.w.inject(s.mac, 1, PriorityClass::Urgent, 6100);
    s.w.kernel.run_until(40'000);
    // urgent goes in the critical cycle after the EIS at 12352
    CHECK(*s.w.packet(u).delivered_at == 12'352 + 352 + 1056 + 1000 + 1088);
    CHECK(*s.w.packet(n1).delivered_at > *s.w.packet(u).delivered_at);
}

TEST_CASE("slot too short for DATA and ACK is rejected") {
    World w(3);
    SuperframeConfig c;
    c.nc_slot = 1500;
    CHECK_THROWS_AS(SsMac(w.ctx(), w.roles, 10, c, FrameSizes{}, {{1, 2}, {1}}), ConfigError);
}
