#include "wban/metrics.hpp"

#include "wban/error.hpp"

#include <cmath>

namespace wban {

double reliability(const UserPriorityParams& up, double p_fail) {
    return 1.0 - std::pow(p_fail, up.num_stages());
}

namespace {

struct SlotCounts {
    double x_eap = 0.0;
    double x_rap = 0.0;
};

SlotCounts expected_states_per_phase(const SolutionState& st, double csma_slot) {
    SlotCounts c;
    if (st.t_e_eap > 0) c.x_eap = st.phases.eap_slots / (st.t_e_eap / csma_slot);
    if (st.t_e_rap > 0) c.x_rap = st.phases.rap_slots / (st.t_e_rap / csma_slot);
    return c;
}

// transmission probability of the phases a UP may use
double permitted_tran_prob(int up, const SolutionState& st) {
    if (up != kHighestPriority) return st.p_tran_rap;
    return st.phases.eap_weight * st.p_tran_eap + st.phases.rap_weight * st.p_tran_rap;
}

}  // namespace

PerUp normalized_throughput(const SolutionState& st, const Scenario& s) {
    if (st.phases.rap_slots <= 0)
        throw Error(ErrorKind::Domain, "throughput needs a RAP of at least one slot");
    const double slot = s.phy.csma_slot;
    const SlotCounts x = expected_states_per_phase(st, slot);
    const double payload_slots = 8.0 * s.payload_bytes / s.phy.psdu_rate / slot;
    const double frame_slots = static_cast<double>(st.phases.eap_slots + st.phases.rap_slots);

    PerUp out = PerUp::Zero();
    for (int i = 0; i < kNumPriorities; ++i) {
        if (!st.active(i)) continue;
        double busy_states = st.p_tran_rap * x.x_rap;
        if (i == kHighestPriority) busy_states += st.p_tran_eap * x.x_eap;
        out[i] = st.p_succ[i] * busy_states * payload_slots / frame_slots;
    }
    return out;
}

EnergyBreakdown energy_consumption(int i, const SolutionState& st, const Scenario& s,
                                   const ExchangeDurations& d) {
    const PhyMacConfig& phy = s.phy;
    const double p_tran = permitted_tran_prob(i, st);

    double own_succ = 0.0, own_coll = 0.0;
    if (s.mechanism == Mechanism::Basic) {
        own_succ = d.t_data * phy.p_tx + d.t_ctrl * phy.p_rx + phy.sifs * phy.p_idle;
        own_coll = own_succ;
    } else {
        own_succ = d.t_ctrl * phy.p_tx                          // RTS
                   + d.t_ctrl * phy.p_rx                        // CTS
                   + d.t_data * phy.p_tx + d.t_ctrl * phy.p_rx  // DATA, ACK
                   + 3 * phy.sifs * phy.p_idle;
        own_coll = d.t_ctrl * phy.p_tx + d.t_ctrl * phy.p_rx + phy.sifs * phy.p_idle;
    }

    double sum_succ = 0.0, sum_coll = 0.0, sum_error = 0.0;
    for (int k = 0; k < kNumPriorities; ++k) {
        if (!st.active(k)) continue;
        sum_succ += st.p_succ[k];
        sum_coll += st.p_coll[k];
        sum_error += st.p_error[k];
    }

    EnergyBreakdown e;
    e.idle = phy.csma_slot * phy.p_idle * st.p_idle[i];
    e.succ = own_succ * p_tran * st.p_succ[i] +
             d.t_succ * phy.p_idle * p_tran * (sum_succ - st.p_succ[i]);
    e.coll = own_coll * p_tran * st.p_coll[i] +
             d.t_coll * phy.p_idle * p_tran * (sum_coll - st.p_coll[i]);
    e.error = own_succ * p_tran * st.p_error[i] +
              d.t_succ * phy.p_idle * p_tran * (sum_error - st.p_error[i]);
    return e;
}

double waiting_time(int up_index, const Scenario& s) {
    return up_index == kHighestPriority ? 0.0 : s.eap1_len / 2.0;
}

double average_access_delay(const UserPriorityParams& up, double p_fail, double t_e,
                            double t_wait) {
    const int stages = up.num_stages();
    double delay = t_wait;
    double backoff_so_far = 0.0;
    double pj = 1.0;
    for (int j = 0; j < stages; ++j) {
        backoff_so_far += (cw_schedule(up, j) + 1) / 2.0;
        delay += pj * (1.0 - p_fail) * backoff_so_far * t_e;
        pj *= p_fail;
    }
    // dropped after the last stage: every stage's backoff was spent
    delay += pj * backoff_so_far * t_e;
    return delay;
}

MetricsReport analytical_metrics(const SolutionState& st, const Scenario& s) {
    MetricsReport r;
    const SlotCounts x = expected_states_per_phase(st, s.phy.csma_slot);
    r.x_eap = x.x_eap;
    r.x_rap = x.x_rap;
    const PerUp s_norm = normalized_throughput(st, s);
    for (int i = 0; i < kNumPriorities; ++i) {
        if (!st.active(i)) continue;
        const auto& up = s.up_table[i];
        r.available[i] = true;
        r.reliability[i] = reliability(up, st.p_fail[i]);
        r.throughput[i] = s_norm[i];
        r.energy[i] = energy_consumption(i, st, s, st.durations).total();
        r.energy_per_second[i] = st.t_e[i] > 0 ? r.energy[i] / st.t_e[i] : 0.0;
        r.t_wait[i] = waiting_time(i, s);
        r.delay[i] = average_access_delay(up, st.p_fail[i], st.t_e[i], r.t_wait[i]);
    }
    return r;
}

}  // namespace wban
