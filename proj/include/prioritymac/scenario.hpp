#pragma once

#include "prioritymac/frogmac.hpp"
#include "prioritymac/metrics.hpp"
#include "prioritymac/radio_channel.hpp"
#include "prioritymac/ssmac.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pmac {

struct TrafficParams {
    Duration urgent_interval = 120 * kSecond;
    Duration normal_interval = 10 * kSecond;
    Duration urgent_deadline = 100 * kMillisecond;
    std::uint32_t packet_length = 34;
    std::size_t queue_capacity = 10;
};

/// One simulated configuration. Node 0 is the sink/controller; sensors
/// 1..n_urgent generate urgent traffic (and normal traffic when
/// urgent_sends_normal), the next n_normal_only sensors generate normal
/// traffic only.
struct Scenario {
    std::string id;
    Protocol protocol = Protocol::SsMac;
    std::uint32_t total_nodes = 20;
    std::uint32_t n_urgent = 0;
    std::uint32_t n_normal_only = 0;
    bool urgent_sends_normal = true;
    SimTime duration = 5000 * kSecond;
    TrafficParams traffic;
    ChannelConfig channel;
    FrameSizes frames;
    SuperframeConfig superframe;
    FrogParams frog;
};

/// Rejected parameter, named by its config key.
class ValidationError : public ConfigError {
public:
    ValidationError(std::string key, const std::string& message)
        : ConfigError(key + ": " + message), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Throws ValidationError for the first invalid parameter.
void validate(const Scenario& scenario);

struct NodeLayout {
    std::vector<NodeRole> roles;
    std::vector<NodeId> urgent_nodes;
    std::vector<NodeId> normal_nodes;
};

NodeLayout layout_for(const Scenario& scenario);

std::string default_scenario_id(const Scenario& scenario);

struct RunOutput {
    ScenarioResult result;
    std::uint64_t events = 0;
    ChannelStats channel;
    std::optional<SsMac::Stats> ss;
    std::optional<FrogMac::Stats> frog;
    /// generated = delivered + dropped + queued holds per (node, class).
    bool conserved = false;
    std::vector<Packet> packets;
};

/// Validates, builds and runs one scenario for one seed. Identical inputs
/// give identical outputs.
RunOutput run_scenario(const Scenario& scenario, std::uint64_t seed, std::ostream* trace = nullptr);

/// Per (node, class) conservation check over a finished run.
bool check_conservation(const PacketLedger& ledger, const MacProtocol& mac);

}  // namespace pmac
