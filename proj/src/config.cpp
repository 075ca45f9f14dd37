#include "prioritymac/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>

namespace pmac {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ValidationError(key, "expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

std::uint32_t parse_u32(const std::string& key, const std::string& text) {
    const std::uint64_t v = parse_uint(key, text);
    if (v > UINT32_MAX) {
        throw ValidationError(key, "value out of range");
    }
    return static_cast<std::uint32_t>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no") {
        return false;
    }
    throw ValidationError(key, "expected true or false, got '" + text + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& text, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(static_cast<T>(parse(key, trim(item))));
    }
    if (out.empty()) {
        throw ValidationError(key, "list is empty");
    }
    return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + std::to_string(v[i]);
    }
    return s;
}

struct Binding {
    std::string_view key;
    std::function<void(SweepConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const SweepConfig&)> get;
};

#define PMAC_U32(name, field)                                                                              \
    Binding {                                                                                              \
        name, [](SweepConfig& c, const std::string& k, const std::string& v) { c.field = parse_u32(k, v); }, \
            [](const SweepConfig& c) { return std::to_string(c.field); }                                   \
    }
#define PMAC_US(name, field)                                                                                \
    Binding {                                                                                               \
        name, [](SweepConfig& c, const std::string& k, const std::string& v) { c.field = parse_uint(k, v); }, \
            [](const SweepConfig& c) { return std::to_string(c.field); }                                    \
    }
#define PMAC_SEC(name, field)                                                                                   \
    Binding {                                                                                                   \
        name, [](SweepConfig& c, const std::string& k, const std::string& v) { c.field = parse_seconds(k, v); }, \
            [](const SweepConfig& c) { return format_seconds(c.field); }                                        \
    }

const std::vector<Binding>& bindings() {
    static const std::vector<Binding> table = {
        {"scenario_id", [](SweepConfig& c, const std::string&, const std::string& v) { c.base.id = v; },
         [](const SweepConfig& c) { return c.base.id; }},
        {"protocol",
         [](SweepConfig& c, const std::string& k, const std::string& v) {
             if (v == "ssmac") {
                 c.base.protocol = Protocol::SsMac;
             } else if (v == "frogmac") {
                 c.base.protocol = Protocol::FrogMac;
             } else {
                 throw ValidationError(k, "expected ssmac or frogmac, got '" + v + "'");
             }
         },
         [](const SweepConfig& c) { return std::string(to_string(c.base.protocol)); }},
        PMAC_U32("total_nodes", base.total_nodes),
        PMAC_U32("urgent_nodes", base.n_urgent),
        PMAC_U32("normal_only_nodes", base.n_normal_only),
        {"urgent_sends_normal",
         [](SweepConfig& c, const std::string& k, const std::string& v) {
             c.base.urgent_sends_normal = parse_bool(k, v);
         },
         [](const SweepConfig& c) { return std::string(c.base.urgent_sends_normal ? "true" : "false"); }},
        PMAC_SEC("duration_s", base.duration),
        PMAC_SEC("urgent_interval_s", base.traffic.urgent_interval),
        PMAC_SEC("normal_interval_s", base.traffic.normal_interval),
        PMAC_US("urgent_deadline_us", base.traffic.urgent_deadline),
        PMAC_U32("packet_length", base.traffic.packet_length),
        {"queue_capacity",
         [](SweepConfig& c, const std::string& k, const std::string& v) {
             c.base.traffic.queue_capacity = parse_uint(k, v);
         },
         [](const SweepConfig& c) { return std::to_string(c.base.traffic.queue_capacity); }},
        PMAC_US("byte_time_us", base.channel.byte_time),
        PMAC_US("propagation_delay_us", base.channel.propagation_delay),
        PMAC_U32("control_bytes", base.frames.control),
        PMAC_U32("dsp_header_bytes", base.frames.dsp_header),
        PMAC_U32("dsp_grant_bytes", base.frames.dsp_per_grant),
        PMAC_US("nc_slot_us", base.superframe.nc_slot),
        PMAC_US("eis_us", base.superframe.eis),
        PMAC_US("rrp_subslot_us", base.superframe.rrp_subslot),
        PMAC_US("dsp_us", base.superframe.dsp),
        {"eis_per_slot",
         [](SweepConfig& c, const std::string& k, const std::string& v) {
             c.base.superframe.eis_per_slot = parse_bool(k, v);
         },
         [](const SweepConfig& c) { return std::string(c.base.superframe.eis_per_slot ? "true" : "false"); }},
        {"sifs_us",
         [](SweepConfig& c, const std::string& k, const std::string& v) {
             c.base.superframe.sifs = parse_uint(k, v);
             c.base.frog.sifs = c.base.superframe.sifs;
         },
         [](const SweepConfig& c) { return std::to_string(c.base.frog.sifs); }},
        PMAC_U32("frag_size", base.frog.frag_size),
        PMAC_U32("header_bytes", base.frog.header_bytes),
        PMAC_US("ifs_urgent_us", base.frog.ifs_urgent),
        PMAC_US("ifs_normal_us", base.frog.ifs_normal),
        PMAC_US("gap_frag_us", base.frog.gap_frag),
        PMAC_US("backoff_slot_us", base.frog.backoff_slot),
        PMAC_U32("cw_min", base.frog.cw_min),
        PMAC_U32("cw_max", base.frog.cw_max),
        PMAC_U32("retry_limit", base.frog.retry_limit),
        PMAC_US("ack_timeout_us", base.frog.ack_timeout),
        {"force_backoff",
         [](SweepConfig& c, const std::string& k, const std::string& v) {
             if (v == "none") {
                 c.base.frog.forced_backoff.reset();
             } else {
                 c.base.frog.forced_backoff = parse_u32(k, v);
             }
         },
         [](const SweepConfig& c) {
             return c.base.frog.forced_backoff ? std::to_string(*c.base.frog.forced_backoff) : std::string("none");
         }},
        {"seeds",
         [](SweepConfig& c, const std::string& k, const std::string& v) {
             c.seeds = parse_list<std::uint64_t>(k, v, parse_uint);
         },
         [](const SweepConfig& c) { return join(c.seeds); }},
        {"urgent_points",
         [](SweepConfig& c, const std::string& k, const std::string& v) {
             c.urgent_points = parse_list<std::uint32_t>(k, v, parse_u32);
         },
         [](const SweepConfig& c) { return join(c.urgent_points); }},
        {"frag_points",
         [](SweepConfig& c, const std::string& k, const std::string& v) {
             c.frag_points = parse_list<std::uint32_t>(k, v, parse_u32);
         },
         [](const SweepConfig& c) { return join(c.frag_points); }},
        PMAC_SEC("stress_urgent_interval_s", stress_urgent_interval),
        PMAC_US("stress_urgent_deadline_us", stress_urgent_deadline),
        PMAC_U32("threads", threads),
    };
    return table;
}

#undef PMAC_U32
#undef PMAC_US
#undef PMAC_SEC

}  // namespace

Duration parse_seconds(const std::string& key, const std::string& text) {
    const auto dot = text.find('.');
    const std::string whole = text.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
    if (frac.size() > 6) {
        throw ValidationError(key, "at most six decimals are supported");
    }
    const Duration w = whole.empty() ? 0 : parse_uint(key, whole);
    frac.resize(6, '0');
    return w * kSecond + parse_uint(key, frac);
}

std::string format_seconds(Duration d) {
    std::string s = std::to_string(d / kSecond);
    if (const Duration f = d % kSecond; f != 0) {
        std::string frac = std::to_string(f);
        frac.insert(0, 6 - frac.size(), '0');
        while (frac.back() == '0') {
            frac.pop_back();
        }
        s += "." + frac;
    }
    return s;
}

ConfigEntries parse_config(std::istream& in) {
    ConfigEntries out;
    std::set<std::string> seen;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string body = trim(line);
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(number) + ": expected key = value");
        }
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(number) + ": empty key");
        }
        if (!seen.insert(key).second) {
            throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

ConfigEntries load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    return parse_config(in);
}

void apply_entry(SweepConfig& config, const std::string& key, const std::string& value) {
    for (const Binding& b : bindings()) {
        if (b.key == key) {
            b.set(config, key, value);
            return;
        }
    }
    throw ValidationError(key, "unknown key");
}

SweepConfig build_sweep_config(const ConfigEntries& entries) {
    SweepConfig config;
    for (const auto& [k, v] : entries) {
        apply_entry(config, k, v);
    }
    return config;
}

ConfigEntries describe(const SweepConfig& config) {
    ConfigEntries out;
    for (const Binding& b : bindings()) {
        out.emplace_back(std::string(b.key), b.get(config));
    }
    return out;
}

}  // namespace pmac
