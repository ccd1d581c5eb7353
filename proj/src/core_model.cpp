#include "wban/core_model.hpp"

#include "wban/error.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace wban {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::StageRange: return "stage-range";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::InfeasiblePhase: return "infeasible-phase";
        case ErrorKind::DegenerateDenominator: return "degenerate-denominator";
        case ErrorKind::BlockedChannel: return "blocked-channel";
        case ErrorKind::StaleState: return "stale-state";
        case ErrorKind::Convergence: return "convergence";
        case ErrorKind::Configuration: return "configuration";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Report: return "report";
    }
    return "unknown";
}

std::string_view to_string(Mechanism m) {
    return m == Mechanism::Basic ? "basic" : "rtscts";
}

std::string_view to_string(Traffic t) {
    return t == Traffic::Saturated ? "saturated" : "nonsaturated";
}

const PriorityTable& default_priority_table() {
    static const PriorityTable table = {{
        {0, 16, 64, 4, 3},
        {1, 16, 32, 2, 5},
        {2, 8, 32, 4, 3},
        {3, 8, 16, 2, 5},
        {4, 4, 16, 4, 3},
        {5, 4, 8, 2, 5},
        {6, 2, 8, 4, 3},
        {7, 1, 4, 2, 5},
    }};
    return table;
}

namespace {

[[noreturn]] void invalid(const std::string& msg) {
    throw Error(ErrorKind::Validation, msg);
}

}  // namespace

void validate(const PriorityTable& table) {
    std::set<int> seen;
    for (std::size_t row = 0; row < table.size(); ++row) {
        const auto& up = table[row];
        std::ostringstream who;
        who << "UP" << row << ": ";
        if (up.priority_index != static_cast<int>(row))
            invalid(who.str() + "priority_index must equal its table row");
        if (!seen.insert(up.priority_index).second)
            invalid(who.str() + "duplicate priority_index");
        if (up.cw_min < 1) invalid(who.str() + "cw_min must be >= 1");
        if (up.cw_min > up.cw_max) invalid(who.str() + "cw_min > cw_max");
        if (up.m < 0 || up.x < 0) invalid(who.str() + "m and x must be nonnegative");
        if (up.m % 2 != 0) invalid(who.str() + "m must be even");
        // UP7 of the NB table reaches only 2 by doubling and jumps to 4 after stage m
        if (static_cast<long long>(up.cw_min) << (up.m / 2) > up.cw_max)
            invalid(who.str() + "cw_min * 2^(m/2) exceeds cw_max");
    }
}

void validate(const PhyMacConfig& phy) {
    if (phy.preamble_bits < 0 || phy.phy_header_bits < 0 || phy.mac_header_bits < 0 ||
        phy.fcs_bits < 0 || phy.ctrl_frame_bits < 0)
        invalid("frame bit counts must be nonnegative");
    if (phy.ctrl_frame_bits !=
        phy.preamble_bits + phy.phy_header_bits + phy.mac_header_bits + phy.fcs_bits)
        invalid("ctrl_frame_bits must equal preamble + phy header + mac header + fcs bits");
    if (!(phy.symbol_rate > 0 && phy.plcp_rate > 0 && phy.psdu_rate > 0))
        invalid("rates must be strictly positive");
    if (!(phy.csma_slot > 0 && phy.sifs > 0 && phy.prop_delay > 0))
        invalid("csma_slot, sifs and prop_delay must be strictly positive");
    if (!(phy.p_tx >= 0 && phy.p_rx >= 0 && phy.p_idle >= 0))
        invalid("power values must be nonnegative");
    if (phy.retry_limit < 0) invalid("retry_limit must be nonnegative");
}

void validate(const Scenario& s) {
    validate(s.up_table);
    validate(s.phy);
    if ((s.node_counts < 0).any()) invalid("node counts must be nonnegative");
    if (s.total_nodes() > kMaxBanSize) invalid("total node count exceeds 64");
    if (!(s.ber >= 0.0 && s.ber <= 1.0)) invalid("ber outside [0,1]");
    if (!(s.eap1_len >= 0.0)) invalid("eap1 must be >= 0");
    if (!(s.rap1_len > 0.0)) invalid("rap1 must be > 0");
    if (s.payload_bytes < 0) invalid("payload_bytes must be >= 0");
    if (!s.arrival_rates.isFinite().all() || (s.arrival_rates < 0.0).any())
        invalid("arrival rates must be finite and nonnegative");
    for (const auto& up : s.up_table)
        if (up.last_stage() != s.phy.retry_limit)
            invalid("m + x must equal the retry limit for every UP");
}

int cw_schedule(const UserPriorityParams& up, int stage) {
    if (stage < 0 || stage > up.last_stage()) {
        std::ostringstream os;
        os << "backoff stage " << stage << " outside [0, " << up.last_stage() << "]";
        throw Error(ErrorKind::StageRange, os.str());
    }
    if (stage == 0) return up.cw_min;
    if (stage <= up.m) return up.cw_min << (stage / 2);
    return up.cw_max;
}

double mean_backoff(const UserPriorityParams& up) {
    double sum = 0.0;
    for (int j = 0; j <= up.last_stage(); ++j) sum += (cw_schedule(up, j) + 1) / 2.0;
    return sum / up.num_stages();
}

double data_frame_duration(const PhyMacConfig& phy, int payload_bytes) {
    const double psdu_bits = phy.mac_header_bits + 8.0 * payload_bytes + phy.fcs_bits;
    return phy.preamble_bits / phy.symbol_rate + phy.phy_header_bits / phy.plcp_rate +
           psdu_bits / phy.psdu_rate;
}

double control_frame_duration(const PhyMacConfig& phy) {
    return data_frame_duration(phy, 0);
}

long exchange_error_bits(const PhyMacConfig& phy, Mechanism mechanism, int payload_bytes) {
    const long data_bits = static_cast<long>(phy.preamble_bits) + phy.phy_header_bits +
                           phy.mac_header_bits + 8L * payload_bytes + phy.fcs_bits;
    const long ctrl_frames = mechanism == Mechanism::Basic ? 1 : 3;
    return data_bits + ctrl_frames * phy.ctrl_frame_bits;
}

double packet_error_rate(double ber, Mechanism mechanism, const PhyMacConfig& phy,
                         int payload_bytes) {
    if (!(ber >= 0.0 && ber <= 1.0)) throw Error(ErrorKind::Domain, "ber outside [0,1]");
    const long bits = exchange_error_bits(phy, mechanism, payload_bytes);
    if (bits == 0 || ber == 0.0) return 0.0;
    if (ber == 1.0) return 1.0;
    // 1 - (1-ber)^bits without cancellation at small ber
    const double per = -std::expm1(static_cast<double>(bits) * std::log1p(-ber));
    return clamp_probability(per);
}

ExchangeDurations exchange_durations(const PhyMacConfig& phy, Mechanism mechanism,
                                     int payload_bytes) {
    ExchangeDurations d;
    d.t_data = data_frame_duration(phy, payload_bytes);
    d.t_ctrl = control_frame_duration(phy);
    const double a = phy.prop_delay;
    if (mechanism == Mechanism::Basic) {
        d.t_succ = d.t_data + d.t_ctrl + phy.sifs + 2 * a;
        d.t_coll = d.t_succ;
    } else {
        d.t_succ = 3 * d.t_ctrl + d.t_data + 3 * phy.sifs + 4 * a;
        d.t_coll = 2 * d.t_ctrl + phy.sifs + 2 * a;
    }
    d.t_error = d.t_succ;
    d.l_succ_slots = static_cast<int>(std::ceil(d.t_succ / phy.csma_slot));
    return d;
}

long phase_slots(double length_s, double csma_slot) {
    // tolerance keeps 0.1 / 125e-6 at 800 rather than 799
    return static_cast<long>(std::floor(length_s / csma_slot + 1e-9));
}

PhaseLayout phase_layout(const Scenario& s) {
    PhaseLayout p;
    p.eap_slots = phase_slots(s.eap1_len, s.phy.csma_slot);
    p.rap_slots = phase_slots(s.rap1_len, s.phy.csma_slot);
    const double total = static_cast<double>(p.eap_slots + p.rap_slots);
    if (total <= 0) throw Error(ErrorKind::Domain, "access phases shorter than one slot");
    p.eap_weight = p.eap_slots / total;
    p.rap_weight = p.rap_slots / total;
    return p;
}

double lock_probability(const UserPriorityParams& up, long eap_slots, long rap_slots,
                        int l_succ_slots, double mean_backoff_slots) {
    const double usable = up.priority_index == kHighestPriority
                              ? static_cast<double>(rap_slots)
                              : static_cast<double>(eap_slots + rap_slots);
    const double denom = usable - l_succ_slots - mean_backoff_slots;
    if (denom <= 0.0) {
        std::ostringstream os;
        os << "UP" << up.priority_index
           << ": permitted phase too short for one exchange plus mean backoff";
        throw Error(ErrorKind::InfeasiblePhase, os.str());
    }
    return clamp_probability(1.0 / denom);
}

void Diagnostics::note(std::string msg) {
    constexpr std::size_t kMaxMessages = 32;
    if (messages.size() < kMaxMessages) messages.push_back(std::move(msg));
}

double clamp_probability(double p, Diagnostics* diag, const char* what) {
    const double clamped = p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
    if (diag != nullptr && std::abs(clamped - p) > 1e-9) {
        ++diag->clamp_events;
        std::ostringstream os;
        os << "clamped " << what << " from " << p;
        diag->note(os.str());
    }
    return clamped;
}

}  // namespace wban
