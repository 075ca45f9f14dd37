#pragma once

#include "prioritymac/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pmac {

/// Parameters of a figure sweep on top of a base scenario.
struct SweepConfig {
    Scenario base;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<std::uint32_t> urgent_points{2, 4, 6, 8, 10};
    std::vector<std::uint32_t> frag_points{2, 4, 8, 16, 32};
    /// Stress preset: short urgent interval and a tight urgent deadline.
    Duration stress_urgent_interval = 2 * kSecond;
    Duration stress_urgent_deadline = 15 * kMillisecond;
    unsigned threads = 0;
};

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// Flat `key = value` lines; `#` starts a comment. Duplicate keys and
/// malformed lines throw ConfigError with the line number.
ConfigEntries parse_config(std::istream& in);
ConfigEntries load_config_file(const std::string& path);

/// Unknown keys and unparsable values throw ValidationError.
void apply_entry(SweepConfig& config, const std::string& key, const std::string& value);
SweepConfig build_sweep_config(const ConfigEntries& entries);

/// Every key with its effective value, in a stable order.
ConfigEntries describe(const SweepConfig& config);

/// Seconds with up to six decimals, e.g. "2.5" -> 2500000 us.
Duration parse_seconds(const std::string& key, const std::string& text);
std::string format_seconds(Duration d);

}  // namespace pmac
