#include "oracles.hpp"
#include "prioritymac/sim_kernel.hpp"

#include <doctest.h>

#include <sstream>

using namespace pmac;

TEST_CASE("event scheduled ahead of the clock fires at its time") {
    Kernel k;
    k.schedule(3, 0, EventKind::Timer, [] {});
    k.run_until(3);
    SimTime fired = 0;
    k.schedule(5, 0, EventKind::Timer, [&] { fired = k.now(); });
    CHECK(k.run_until(10) == 1);
    CHECK(fired == 5);
    CHECK(k.now() == 10);
}

TEST_CASE("equal times fire in insertion order") {
    Kernel k;
    std::vector<int> order;
    k.schedule(5, 0, EventKind::Timer, [&] { order.push_back(10); });
    k.schedule(5, 0, EventKind::Timer, [&] { order.push_back(11); });
    k.run_until(5);
    CHECK(order == std::vector<int>{10, 11});
}

TEST_CASE("scheduling in the past is fatal") {
    Kernel k;
    k.run_until(3);
    CHECK_THROWS_AS(k.schedule(2, 0, EventKind::Timer, [] {}), FatalError);
}

TEST_CASE("empty run advances the clock") {
    Kernel k;
    CHECK(k.run_until(100) == 0);
    CHECK(k.now() == 100);
}

TEST_CASE("heap order") {
    Kernel k;
    std::vector<SimTime> seen;
    for (SimTime t : {3, 1, 2}) {
        k.schedule(t, 0, EventKind::Timer, [&] { seen.push_back(k.now()); });
    }
    k.run_until(10);
    CHECK(seen == std::vector<SimTime>{1, 2, 3});
}

TEST_CASE("cancel") {
    Kernel k;
    bool fired = false;
    auto h = k.schedule(5, 0, EventKind::Timer, [&] { fired = true; });
    CHECK(k.pending(h));
    CHECK(k.cancel(h));
    CHECK_FALSE(k.cancel(h));
    k.run_until(10);
    CHECK_FALSE(fired);

    auto done = k.schedule(12, 0, EventKind::Timer, [] {});
    k.run_until(20);
    CHECK_FALSE(k.cancel(done));
    CHECK_FALSE(k.cancel(EventHandle{}));
}

TEST_CASE("events scheduled from an action at the same instant still run") {
    Kernel k;
    std::vector<int> order;
    k.schedule(4, 0, EventKind::Timer, [&] {
        order.push_back(1);
        k.schedule(4, 0, EventKind::Timer, [&] { order.push_back(3); });
    });
    k.schedule(4, 0, EventKind::Timer, [&] { order.push_back(2); });
    k.run_until(4);
    CHECK(order == std::vector<int>{1, 2, 3});
}

TEST_CASE("clock equals the fire time of the running event") {
    Kernel k;
    RngStream rng(9, 1);
    bool ok = true;
    for (int i = 0; i < 1000; ++i) {
        const SimTime at = rng.uniform(5000);
        k.schedule(at, 0, EventKind::Timer, [&, at] { ok = ok && k.now() == at; });
    }
    k.run_until(5000);
    CHECK(ok);
}

TEST_CASE("execution order matches the sort oracle") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        CHECK(oracle::kernel_order_mismatches(trial, 10'000) == 0);
    }
}

TEST_CASE("trace lines") {
    Kernel k;
    std::ostringstream out;
    k.set_trace(&out);
    k.schedule(7, 3, EventKind::FrameEnd, [] {});
    k.run_until(7);
    CHECK(out.str() == "7,0,3,frame_end\n");
}
