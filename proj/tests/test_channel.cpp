#include "oracles.hpp"
#include "prioritymac/radio_channel.hpp"

#include <doctest.h>


using namespace pmac;

namespace {

struct Recorder : ChannelListener {
    std::vector<std::tuple<NodeId, FrameKind, NodeId, SimTime>> got;
    std::vector<std::pair<char, SimTime>> medium;
    void on_frame(NodeId receiver, const Frame& f, SimTime at) override { got.emplace_back(receiver, f.kind, f.src, at); }
    void on_medium_busy(SimTime at) override { medium.emplace_back('b', at); }
    void on_medium_idle(SimTime at) override { medium.emplace_back('i', at); }
};

Frame frame(FrameKind kind, std::uint32_t bytes) {
    Frame f;
    f.kind = kind;
    f.length_bytes = bytes;
    return f;
}

}  // namespace

TEST_CASE("DATA airtime and intact delivery") {
    Kernel k;
    RadioChannel ch(k, {});
    Recorder r;
    ch.attach(&r, {0, 1, 2});
    CHECK(ch.transmit(1, frame(FrameKind::Data, 34)) == 1088);
    k.run_until(2000);
    REQUIRE(r.got.size() == 2);
    CHECK(r.got[0] == std::tuple{NodeId{0}, FrameKind::Data, NodeId{1}, SimTime{1088}});
    CHECK(std::get<0>(r.got[1]) == 2);
    CHECK(r.medium == std::vector<std::pair<char, SimTime>>{{'b', 0}, {'i', 1088}});
}

TEST_CASE("overlapping frames are both lost") {
    Kernel k;
    RadioChannel ch(k, {});
    Recorder r;
    ch.attach(&r, {0, 1, 2});
    ch.transmit(1, frame(FrameKind::Data, 34), 0);
    ch.transmit(2, frame(FrameKind::Data, 34), 988);
    k.run_until(5000);
    CHECK(r.got.empty());
    CHECK(ch.stats().corrupted_of(FrameKind::Data) == 2);
}

TEST_CASE("back-to-back frames do not collide") {
    Kernel k;
    RadioChannel ch(k, {});
    Recorder r;
    ch.attach(&r, {0, 1, 2});
    ch.transmit(1, frame(FrameKind::Ack, 11), 0);
    ch.transmit(2, frame(FrameKind::Ack, 11), 352);
    k.run_until(5000);
    CHECK(r.got.size() == 4);
}

TEST_CASE("carrier sense uses half-open intervals") {
    Kernel k;
    RadioChannel ch(k, {});
    Recorder r;
    ch.attach(&r, {0, 1, 2});
    CHECK(ch.carrier_sense(0) == CarrierState::Idle);
    ch.transmit(1, frame(FrameKind::Rts, 11));
    CHECK(ch.carrier_sense(0, 0) == CarrierState::Busy);
    CHECK(ch.carrier_sense(2, 351) == CarrierState::Busy);
    CHECK(ch.carrier_sense(0, 352) == CarrierState::Idle);
    CHECK(ch.carrier_sense(1, 100) == CarrierState::Idle);  // own frame
}

TEST_CASE("OR-channel energy detection") {
    Kernel k;
    RadioChannel ch(k, {});
    Recorder r;
    ch.attach(&r, {0, 1, 2, 3, 4});
    CHECK_FALSE(ch.or_channel_sense(0, 0, 352));
    k.run_until(1000);
    ch.transmit(1, frame(FrameKind::EisInd, 11));
    k.run_until(1400);
    CHECK(ch.or_channel_sense(0, 1000, 1352));
    k.run_until(2000);
    for (NodeId n : {1, 2, 3}) {
        ch.transmit(n, frame(FrameKind::EisInd, 11));
    }
    k.run_until(2400);
    CHECK(ch.or_channel_sense(0, 2000, 2352));
    CHECK_FALSE(ch.or_channel_sense(0, 1352, 2000));
}

TEST_CASE("transmitting over one's own frame is fatal") {
    Kernel k;
    RadioChannel ch(k, {});
    Recorder r;
    ch.attach(&r, {0, 1});
    ch.transmit(1, frame(FrameKind::Data, 34));
    CHECK_THROWS_AS(ch.transmit(1, frame(FrameKind::Ack, 11), 100), FatalError);
}

TEST_CASE("collision verdicts match the pairwise-overlap oracle") {
    for (std::uint64_t set = 0; set < 100; ++set) {
        CHECK(oracle::channel_verdict_mismatches(set) == 0);
    }
}
