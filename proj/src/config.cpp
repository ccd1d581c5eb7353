#include "wban/config.hpp"

#include "wban/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <vector>

namespace wban {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Value {
    std::string text;
    long line = 0;
    std::string key;

    double real() const {
        double v = 0.0;
        const char* end = text.data() + text.size();
        auto [p, ec] = std::from_chars(text.data(), end, v);
        if (ec != std::errc() || p != end || text.empty())
            throw ParseError(key + ": '" + text + "' is not a number", line);
        return v;
    }

    long integer() const {
        long v = 0;
        const char* end = text.data() + text.size();
        auto [p, ec] = std::from_chars(text.data(), end, v);
        if (ec != std::errc() || p != end || text.empty())
            throw ParseError(key + ": '" + text + "' is not an integer", line);
        return v;
    }

    std::vector<Value> list() const {
        std::vector<Value> out;
        std::size_t start = 0;
        while (true) {
            const auto comma = text.find(',', start);
            out.push_back({trim(text.substr(start, comma - start)), line, key});
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    }
};

using Section = std::map<std::string, Value>;

std::map<std::string, Section> read_ini(std::istream& in) {
    std::map<std::string, Section> sections;
    std::string raw, current;
    long line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find_first_of("#;");
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']') throw ParseError("unterminated section header", line);
            current = trim(text.substr(1, text.size() - 2));
            if (current.empty()) throw ParseError("empty section name", line);
            if (sections.count(current)) throw ParseError("duplicate section [" + current + "]", line);
            sections[current];
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line);
        if (current.empty()) throw ParseError("key outside of any section", line);
        const std::string key = trim(text.substr(0, eq));
        if (key.empty()) throw ParseError("missing key", line);
        Section& sec = sections[current];
        if (sec.count(key)) throw ParseError("duplicate key '" + key + "'", line);
        sec[key] = Value{trim(text.substr(eq + 1)), line, key};
    }
    return sections;
}

// Dispatches each key of a section to its handler; leftovers are unknown keys.
void apply(const std::string& name, const Section& sec,
           const std::map<std::string, std::function<void(const Value&)>>& handlers) {
    for (const auto& [key, value] : sec) {
        const auto h = handlers.find(key);
        if (h == handlers.end())
            throw Error(ErrorKind::Configuration, "line " + std::to_string(value.line) +
                                                      ": unknown key '" + key + "' in [" +
                                                      name + "]");
        h->second(value);
    }
}

int to_int(const Value& v) {
    const long n = v.integer();
    if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max())
        throw ParseError(v.key + ": value out of range", v.line);
    return static_cast<int>(n);
}

void scenario_section(const Section& sec, Scenario& s) {
    apply("scenario", sec,
          {{"nodes_per_up", [&](const Value& v) { s.node_counts.setConstant(to_int(v)); }},
           {"node_counts",
            [&](const Value& v) {
                const auto items = v.list();
                if (items.size() != kNumPriorities)
                    throw ParseError("node_counts needs 8 entries", v.line);
                for (int i = 0; i < kNumPriorities; ++i) s.node_counts[i] = to_int(items[i]);
            }},
           {"arrival_rate", [&](const Value& v) { s.arrival_rates.setConstant(v.real()); }},
           {"arrival_rates",
            [&](const Value& v) {
                const auto items = v.list();
                if (items.size() != kNumPriorities)
                    throw ParseError("arrival_rates needs 8 entries", v.line);
                for (int i = 0; i < kNumPriorities; ++i) s.arrival_rates[i] = items[i].real();
            }},
           {"ber", [&](const Value& v) { s.ber = v.real(); }},
           {"payload_bytes", [&](const Value& v) { s.payload_bytes = to_int(v); }},
           {"eap1", [&](const Value& v) { s.eap1_len = v.real(); }},
           {"rap1", [&](const Value& v) { s.rap1_len = v.real(); }},
           {"mechanism",
            [&](const Value& v) {
                if (v.text == "basic") s.mechanism = Mechanism::Basic;
                else if (v.text == "rtscts") s.mechanism = Mechanism::RtsCts;
                else throw ParseError("mechanism must be basic or rtscts", v.line);
            }},
           {"traffic", [&](const Value& v) {
                if (v.text == "saturated") s.traffic = Traffic::Saturated;
                else if (v.text == "nonsaturated") s.traffic = Traffic::NonSaturated;
                else throw ParseError("traffic must be saturated or nonsaturated", v.line);
            }}});
}

void phy_section(const Section& sec, PhyMacConfig& p) {
    auto i = [](int& f) { return [&f](const Value& v) { f = to_int(v); }; };
    auto d = [](double& f) { return [&f](const Value& v) { f = v.real(); }; };
    apply("phy", sec,
          {{"preamble_bits", i(p.preamble_bits)},
           {"phy_header_bits", i(p.phy_header_bits)},
           {"mac_header_bits", i(p.mac_header_bits)},
           {"fcs_bits", i(p.fcs_bits)},
           {"ctrl_frame_bits", i(p.ctrl_frame_bits)},
           {"symbol_rate", d(p.symbol_rate)},
           {"plcp_rate", d(p.plcp_rate)},
           {"psdu_rate", d(p.psdu_rate)},
           {"csma_slot", d(p.csma_slot)},
           {"sifs", d(p.sifs)},
           {"prop_delay", d(p.prop_delay)},
           {"p_tx", d(p.p_tx)},
           {"p_rx", d(p.p_rx)},
           {"p_idle", d(p.p_idle)},
           {"retry_limit", i(p.retry_limit)}});
}

void up_section(const std::string& name, const Section& sec, UserPriorityParams& up) {
    auto i = [](int& f) { return [&f](const Value& v) { f = to_int(v); }; };
    apply(name, sec, {{"cw_min", i(up.cw_min)}, {"cw_max", i(up.cw_max)}, {"m", i(up.m)}, {"x", i(up.x)}});
}

SweepSpec sweep_section(const Section& sec, const Scenario& base) {
    SweepSpec spec;
    spec.base = base;
    std::optional<double> from, to, step;
    bool have_parameter = false;
    long sweep_line = 0;
    apply("sweep", sec,
          {{"parameter",
            [&](const Value& v) {
                const auto p = parse_swept_parameter(v.text);
                if (!p) throw ParseError("unknown sweep parameter '" + v.text + "'", v.line);
                spec.swept = *p;
                have_parameter = true;
            }},
           {"values",
            [&](const Value& v) {
                for (const Value& item : v.list()) spec.values.push_back(item.real());
                sweep_line = v.line;
            }},
           {"from", [&](const Value& v) { from = v.real(); sweep_line = v.line; }},
           {"to", [&](const Value& v) { to = v.real(); }},
           {"step", [&](const Value& v) { step = v.real(); }},
           {"replications", [&](const Value& v) { spec.replications = to_int(v); }},
           {"seed", [&](const Value& v) {
                if (!v.text.empty() && v.text.front() == '-')
                    throw ParseError("seed must be non-negative", v.line);
                std::uint64_t seed = 0;
                const char* end = v.text.data() + v.text.size();
                auto [p, ec] = std::from_chars(v.text.data(), end, seed);
                if (ec != std::errc() || p != end || v.text.empty())
                    throw ParseError("seed: '" + v.text + "' is not an integer", v.line);
                spec.seed = seed;
            }}});
    if (!have_parameter) throw Error(ErrorKind::Configuration, "[sweep] needs a parameter");
    const bool ranged = from || to || step;
    if (ranged && !spec.values.empty())
        throw Error(ErrorKind::Configuration, "[sweep] takes values or from/to/step, not both");
    if (ranged) {
        if (!from || !to || !step)
            throw Error(ErrorKind::Configuration, "[sweep] range needs from, to and step");
        if (!(*step > 0) || *to < *from)
            throw Error(ErrorKind::Configuration, "line " + std::to_string(sweep_line) +
                                                      ": [sweep] range needs step > 0 and to >= from");
        const long n = std::lround((*to - *from) / *step);
        if (n > 100000) throw Error(ErrorKind::Configuration, "[sweep] range too long");
        for (long k = 0; k <= n; ++k) spec.values.push_back(*from + k * *step);
    }
    if (spec.values.empty()) throw Error(ErrorKind::Configuration, "[sweep] has no values");
    return spec;
}

}  // namespace

Config parse_config(std::istream& in) {
    const auto sections = read_ini(in);
    Config cfg;
    static const std::set<std::string> known = {"scenario", "phy",  "sweep", "up0", "up1", "up2",
                                                "up3",      "up4",  "up5",   "up6", "up7"};
    for (const auto& [name, sec] : sections)
        if (!known.count(name))
            throw Error(ErrorKind::Configuration, "unknown section [" + name + "]");

    if (auto it = sections.find("scenario"); it != sections.end())
        scenario_section(it->second, cfg.scenario);
    if (auto it = sections.find("phy"); it != sections.end()) phy_section(it->second, cfg.scenario.phy);
    for (int i = 0; i < kNumPriorities; ++i) {
        const std::string name = "up" + std::to_string(i);
        if (auto it = sections.find(name); it != sections.end())
            up_section(name, it->second, cfg.scenario.up_table[i]);
    }
    validate(cfg.scenario);
    if (auto it = sections.find("sweep"); it != sections.end()) {
        cfg.sweep = sweep_section(it->second, cfg.scenario);
        validate(*cfg.sweep);
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Configuration, "cannot open config file '" + path + "'");
    return parse_config(in);
}

}  // namespace wban
