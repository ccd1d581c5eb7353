#ifndef WBAN_CORE_MODEL_HPP
#define WBAN_CORE_MODEL_HPP

#include <Eigen/Dense>

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace wban {

inline constexpr int kNumPriorities = 8;
inline constexpr int kHighestPriority = 7;
inline constexpr int kMaxBanSize = 64;

/// One value per user priority, indexed by UP (0 = background, 7 = emergency).
using PerUp = Eigen::Array<double, kNumPriorities, 1>;
using NodeCounts = Eigen::Array<int, kNumPriorities, 1>;

enum class Mechanism { Basic, RtsCts };
enum class Traffic { Saturated, NonSaturated };

std::string_view to_string(Mechanism m);
std::string_view to_string(Traffic t);

struct UserPriorityParams {
    int priority_index = 0;
    int cw_min = 1;
    int cw_max = 1;
    int m = 0;  // stages over which the window doubles every even stage
    int x = 0;  // further stages held at cw_max

    int last_stage() const { return m + x; }
    int num_stages() const { return m + x + 1; }
};

using PriorityTable = std::array<UserPriorityParams, kNumPriorities>;

/// CW bounds and stage limits for the eight user priorities of the NB PHY.
const PriorityTable& default_priority_table();

/// Throws Validation if any row breaks the table invariants.
void validate(const PriorityTable& table);

/// Narrowband PHY/MAC attributes. Header and FCS sizes are in bits.
struct PhyMacConfig {
    int preamble_bits = 90;
    int phy_header_bits = 31;
    int mac_header_bits = 56;
    int fcs_bits = 16;
    int ctrl_frame_bits = 193;    // RTS, CTS and I-ACK, each
    double symbol_rate = 600e3;   // symbols/s
    double plcp_rate = 91.9e3;    // bits/s
    double psdu_rate = 971.4e3;   // bits/s
    double csma_slot = 125e-6;    // s
    double sifs = 75e-6;          // s
    double prop_delay = 1e-6;     // s
    double p_tx = 27e-3;          // W
    double p_rx = 1.8e-3;         // W
    double p_idle = 5e-6;         // W
    int retry_limit = 7;
};

void validate(const PhyMacConfig& phy);

struct Scenario {
    NodeCounts node_counts = NodeCounts::Constant(2);
    PerUp arrival_rates = PerUp::Constant(2.0);  // packets/s
    double ber = 2e-5;
    int payload_bytes = 100;
    double eap1_len = 0.1;  // s
    double rap1_len = 0.8;  // s
    Mechanism mechanism = Mechanism::RtsCts;
    Traffic traffic = Traffic::Saturated;
    PhyMacConfig phy;
    PriorityTable up_table = default_priority_table();

    int total_nodes() const { return node_counts.sum(); }
};

/// Throws Validation naming the first violated invariant.
void validate(const Scenario& s);

struct ExchangeDurations {
    double t_data = 0.0;
    double t_ctrl = 0.0;
    double t_succ = 0.0;
    double t_coll = 0.0;
    double t_error = 0.0;
    int l_succ_slots = 0;
};

/// Phase lengths in CSMA slots together with the EAP/RAP mixing weights used for UP7.
struct PhaseLayout {
    long eap_slots = 0;
    long rap_slots = 0;
    double eap_weight = 0.0;
    double rap_weight = 1.0;
};

int cw_schedule(const UserPriorityParams& up, int stage);
double mean_backoff(const UserPriorityParams& up);

double data_frame_duration(const PhyMacConfig& phy, int payload_bytes);
double control_frame_duration(const PhyMacConfig& phy);

/// Bits exposed to channel errors in one exchange (preamble and PHY header included).
long exchange_error_bits(const PhyMacConfig& phy, Mechanism mechanism, int payload_bytes);
double packet_error_rate(double ber, Mechanism mechanism, const PhyMacConfig& phy,
                         int payload_bytes);

ExchangeDurations exchange_durations(const PhyMacConfig& phy, Mechanism mechanism,
                                     int payload_bytes);

long phase_slots(double length_s, double csma_slot);
PhaseLayout phase_layout(const Scenario& s);

double lock_probability(const UserPriorityParams& up, long eap_slots, long rap_slots,
                        int l_succ_slots, double mean_backoff_slots);

/// Clamp events whose correction exceeded the reporting threshold.
struct Diagnostics {
    long clamp_events = 0;
    long empty_phase_events = 0;
    std::vector<std::string> messages;

    void note(std::string msg);
};

/// Clamps to [0,1]; records a diagnostic when the correction exceeds 1e-9.
double clamp_probability(double p, Diagnostics* diag = nullptr, const char* what = "");

}  // namespace wban

#endif  // WBAN_CORE_MODEL_HPP
