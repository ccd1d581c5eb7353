#include "wban/solver.hpp"

#include "wban/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wban {

namespace {

// log of prod (1 - tau_i)^{n_i} over UPs with nodes
double log_idle_product(const PerUp& taus, const NodeCounts& n) {
    double acc = 0.0;
    for (int i = 0; i < kNumPriorities; ++i)
        if (n[i] > 0) acc += n[i] * std::log1p(-taus[i]);
    return acc;
}

double log_idle_eap(const PerUp& taus, const NodeCounts& n) {
    return n[kHighestPriority] > 0 ? n[kHighestPriority] * std::log1p(-taus[kHighestPriority])
                                   : 0.0;
}

// n tau prod / ((1 - tau) p_tran), taking 0/0 as 0
double access_prob(int n, double tau, double log_prod, double p_tran, Diagnostics* diag,
                   const char* phase) {
    if (n <= 0) return 0.0;
    if (p_tran <= 0.0) {
        if (diag != nullptr) {
            ++diag->empty_phase_events;
            diag->note(std::string("no transmissions in ") + phase +
                       "; access probability taken as 0");
        }
        return 0.0;
    }
    const double solo = n * tau * std::exp(log_prod - std::log1p(-tau));
    return clamp_probability(solo / p_tran, diag, "p_acce");
}

}  // namespace

ChannelProbs phase_transmission_probs(const PerUp& taus, const NodeCounts& node_counts) {
    ChannelProbs c;
    const double lr = log_idle_product(taus, node_counts);
    const double le = log_idle_eap(taus, node_counts);
    c.p_idle_rap = std::exp(lr);
    c.p_tran_rap = -std::expm1(lr);
    c.p_idle_eap = std::exp(le);
    c.p_tran_eap = -std::expm1(le);
    return c;
}

NodeProbs node_conditional_probs(int up_index, const PerUp& taus, const NodeCounts& node_counts,
                                 double per, double p_lock, const PhaseLayout& phases,
                                 Diagnostics* diag) {
    const double tau = taus[up_index];
    if (!(tau < 1.0)) {
        std::ostringstream os;
        os << "UP" << up_index << ": tau = 1 makes the conditional probabilities undefined";
        throw Error(ErrorKind::DegenerateDenominator, os.str());
    }
    const int n = node_counts[up_index];
    const double lr = log_idle_product(taus, node_counts);
    const double p_tran_rap = -std::expm1(lr);

    NodeProbs p;
    p.p_idle_rap = clamp_probability(std::exp(lr - std::log1p(-tau)), diag, "p_idle_rap");
    p.p_acce_rap = access_prob(n, tau, lr, p_tran_rap, diag, "RAP");
    p.p_succ_rap = clamp_probability(p.p_acce_rap * (1.0 - per), diag, "p_succ_rap");
    p.p_error_rap = clamp_probability(p.p_acce_rap * per, diag, "p_error_rap");
    p.p_coll_rap = clamp_probability(1.0 - p.p_acce_rap, diag, "p_coll_rap");

    if (up_index != kHighestPriority) {
        p.p_idle = clamp_probability(p.p_idle_rap * (1.0 - p_lock), diag, "p_idle");
        p.p_acce = p.p_acce_rap;
        p.p_succ = p.p_succ_rap;
        p.p_error = p.p_error_rap;
        p.p_coll = p.p_coll_rap;
    } else {
        const double le = log_idle_eap(taus, node_counts);
        const double p_tran_eap = -std::expm1(le);
        p.p_idle_eap = clamp_probability(std::exp(le - std::log1p(-tau)), diag, "p_idle_eap");
        p.p_acce_eap = access_prob(n, tau, le, p_tran_eap, diag, "EAP");
        p.p_succ_eap = clamp_probability(p.p_acce_eap * (1.0 - per), diag, "p_succ_eap");
        p.p_error_eap = clamp_probability(p.p_acce_eap * per, diag, "p_error_eap");
        p.p_coll_eap = clamp_probability(1.0 - p.p_acce_eap, diag, "p_coll_eap");

        const double we = phases.eap_weight;
        const double wr = phases.rap_weight;
        auto mix = [&](double eap, double rap) { return we * eap + wr * rap; };
        p.p_idle = clamp_probability(mix(p.p_idle_eap, p.p_idle_rap) * (1.0 - p_lock), diag,
                                     "p_idle");
        p.p_acce = clamp_probability(mix(p.p_acce_eap, p.p_acce_rap), diag, "p_acce");
        p.p_succ = clamp_probability(mix(p.p_succ_eap, p.p_succ_rap), diag, "p_succ");
        p.p_error = clamp_probability(mix(p.p_error_eap, p.p_error_rap), diag, "p_error");
        p.p_coll = clamp_probability(mix(p.p_coll_eap, p.p_coll_rap), diag, "p_coll");
    }
    p.p_fail = clamp_probability(p.p_coll + p.p_error, diag, "p_fail");
    return p;
}

StateTimes expected_state_time(const ChannelProbs& channel, const std::vector<NodeProbs>& nodes,
                               const NodeCounts& node_counts, const ExchangeDurations& d,
                               double csma_slot, const PhaseLayout& phases) {
    double succ = 0.0, coll = 0.0, err = 0.0;
    for (int i = 0; i < kNumPriorities; ++i) {
        if (node_counts[i] <= 0) continue;
        succ += nodes[i].p_succ_rap;
        coll += nodes[i].p_coll_rap;
        err += nodes[i].p_error_rap;
    }
    StateTimes t;
    t.t_e_rap = csma_slot * (1.0 - channel.p_tran_rap) +
                channel.p_tran_rap * (d.t_succ * succ + d.t_coll * coll + d.t_error * err);
    if (node_counts[kHighestPriority] > 0) {
        const NodeProbs& u7 = nodes[kHighestPriority];
        t.t_e_eap = csma_slot * (1.0 - channel.p_tran_eap) +
                    channel.p_tran_eap * (d.t_succ * u7.p_succ_eap + d.t_coll * u7.p_coll_eap +
                                          d.t_error * u7.p_error_eap);
    } else {
        t.t_e_eap = csma_slot;
    }
    t.t_e.setConstant(t.t_e_rap);
    t.t_e[kHighestPriority] = phases.eap_weight * t.t_e_eap + phases.rap_weight * t.t_e_rap;
    return t;
}

double queue_nonempty_prob(double lambda, double t_e, Traffic traffic) {
    if (traffic == Traffic::Saturated) return 1.0;
    if (!(lambda >= 0.0)) throw Error(ErrorKind::Domain, "arrival rate must be >= 0");
    if (!(t_e > 0.0)) throw Error(ErrorKind::Domain, "expected state time must be > 0");
    if (std::isinf(lambda)) return 1.0;
    return -std::expm1(-lambda * t_e);
}

BackoffEntry tau_from_state(const UserPriorityParams& up, double p_fail, double p_idle,
                            double rho) {
    if (rho <= 0.0) return {};
    if (p_idle <= 0.0) {
        std::ostringstream os;
        os << "UP" << up.priority_index << ": idle probability is zero, backoff never advances";
        throw Error(ErrorKind::BlockedChannel, os.str());
    }
    double attempts = 0.0;  // sum_j p_fail^j
    double backoff = 0.0;   // sum_j (W_j + 1)/2 p_fail^j
    double pj = 1.0;
    for (int j = 0; j <= up.last_stage(); ++j) {
        attempts += pj;
        backoff += (cw_schedule(up, j) + 1) / 2.0 * pj;
        pj *= p_fail;
    }
    BackoffEntry e;
    e.b000 = 1.0 / (attempts + backoff / p_idle + (1.0 - rho) / rho);
    e.tau = e.b000 * attempts;
    return e;
}

namespace {

// Configuration-only quantities, fixed for one solve.
struct Model {
    const Scenario* s = nullptr;
    double per = 0.0;
    ExchangeDurations durations;
    PhaseLayout phases;
    PerUp p_lock = PerUp::Zero();
};

Model build_model(const Scenario& s) {
    Model m;
    m.s = &s;
    m.per = packet_error_rate(s.ber, s.mechanism, s.phy, s.payload_bytes);
    m.durations = exchange_durations(s.phy, s.mechanism, s.payload_bytes);
    m.phases = phase_layout(s);
    for (int i = 0; i < kNumPriorities; ++i) {
        if (s.node_counts[i] <= 0) continue;
        const auto& up = s.up_table[i];
        m.p_lock[i] = lock_probability(up, m.phases.eap_slots, m.phases.rap_slots,
                                       m.durations.l_succ_slots, mean_backoff(up));
    }
    return m;
}

// Layout of the iterate: [tau | rho | p_fail | p_idle] per UP, then t_e_eap, t_e_rap in slots.
constexpr int kTau = 0;
constexpr int kRho = kNumPriorities;
constexpr int kFail = 2 * kNumPriorities;
constexpr int kIdle = 3 * kNumPriorities;
constexpr int kTeEap = 4 * kNumPriorities;
constexpr int kTeRap = kTeEap + 1;
constexpr int kStateSize = kTeRap + 1;

using Iterate = Eigen::Matrix<double, kStateSize, 1>;

struct Evaluation {
    ChannelProbs channel;
    std::vector<NodeProbs> nodes = std::vector<NodeProbs>(kNumPriorities);
    StateTimes times;
    Iterate image = Iterate::Zero();
};

// One pass of the self-map. Everything is driven by the current taus; the
// returned image holds the re-evaluated value of every iterate component.
Evaluation evaluate(const Model& m, const Iterate& x, Diagnostics* diag) {
    const Scenario& s = *m.s;
    const PerUp taus = x.segment<kNumPriorities>(kTau).array();
    Evaluation ev;
    ev.channel = phase_transmission_probs(taus, s.node_counts);
    for (int i = 0; i < kNumPriorities; ++i)
        if (s.node_counts[i] > 0)
            ev.nodes[i] = node_conditional_probs(i, taus, s.node_counts, m.per, m.p_lock[i],
                                                 m.phases, diag);
    ev.times = expected_state_time(ev.channel, ev.nodes, s.node_counts, m.durations,
                                   s.phy.csma_slot, m.phases);

    const double slot = s.phy.csma_slot;
    ev.image[kTeEap] = ev.times.t_e_eap / slot;
    ev.image[kTeRap] = ev.times.t_e_rap / slot;
    for (int i = 0; i < kNumPriorities; ++i) {
        if (s.node_counts[i] <= 0) continue;
        const NodeProbs& np = ev.nodes[i];
        const double rho = queue_nonempty_prob(s.arrival_rates[i], ev.times.t_e[i], s.traffic);
        const BackoffEntry be = tau_from_state(s.up_table[i], np.p_fail, np.p_idle, rho);
        ev.image[kTau + i] = be.tau;
        ev.image[kRho + i] = rho;
        ev.image[kFail + i] = np.p_fail;
        ev.image[kIdle + i] = np.p_idle;
    }
    return ev;
}

Iterate pack(const SolutionState& st, double slot) {
    Iterate x;
    x.segment<kNumPriorities>(kTau) = st.tau.matrix();
    x.segment<kNumPriorities>(kRho) = st.rho.matrix();
    x.segment<kNumPriorities>(kFail) = st.p_fail.matrix();
    x.segment<kNumPriorities>(kIdle) = st.p_idle.matrix();
    x[kTeEap] = st.t_e_eap / slot;
    x[kTeRap] = st.t_e_rap / slot;
    return x;
}

SolutionState unpack(const Model& m, const Iterate& x, const Evaluation& ev) {
    const Scenario& s = *m.s;
    SolutionState st;
    st.node_counts = s.node_counts;
    st.per = m.per;
    st.durations = m.durations;
    st.phases = m.phases;
    st.p_lock = m.p_lock;
    st.tau = x.segment<kNumPriorities>(kTau).array();
    st.rho = x.segment<kNumPriorities>(kRho).array();

    st.p_tran_eap = ev.channel.p_tran_eap;
    st.p_tran_rap = ev.channel.p_tran_rap;
    st.p_idle_eap = ev.channel.p_idle_eap;
    st.p_idle_rap = ev.channel.p_idle_rap;
    st.t_e_eap = ev.times.t_e_eap;
    st.t_e_rap = ev.times.t_e_rap;
    st.t_e = ev.times.t_e;

    for (int i = 0; i < kNumPriorities; ++i) {
        if (s.node_counts[i] <= 0) {
            st.t_e[i] = 0.0;
            continue;
        }
        const NodeProbs& p = ev.nodes[i];
        st.p_idle[i] = p.p_idle;
        st.p_fail[i] = p.p_fail;
        st.p_acce[i] = p.p_acce;
        st.p_acce_eap[i] = p.p_acce_eap;
        st.p_acce_rap[i] = p.p_acce_rap;
        st.p_succ[i] = p.p_succ;
        st.p_succ_eap[i] = p.p_succ_eap;
        st.p_succ_rap[i] = p.p_succ_rap;
        st.p_coll[i] = p.p_coll;
        st.p_coll_eap[i] = p.p_coll_eap;
        st.p_coll_rap[i] = p.p_coll_rap;
        st.p_error[i] = p.p_error;
        st.p_error_eap[i] = p.p_error_eap;
        st.p_error_rap[i] = p.p_error_rap;
        st.b000[i] = tau_from_state(s.up_table[i], p.p_fail, p.p_idle, st.rho[i]).b000;
    }
    return st;
}

}  // namespace

SolutionState solve_fixed_point(const Scenario& scenario, const SolverOptions& options) {
    validate(scenario);
    const Model m = build_model(scenario);
    Diagnostics diag;

    Iterate x = Iterate::Zero();
    for (int i = 0; i < kNumPriorities; ++i) {
        if (scenario.node_counts[i] <= 0) continue;
        x[kTau + i] = options.initial_tau;
        x[kRho + i] = 1.0;
    }
    {
        // p_idle and t_e start consistent with the initial taus; p_fail starts at 0
        const Evaluation ev = evaluate(m, x, nullptr);
        for (int i = 0; i < kNumPriorities; ++i)
            if (scenario.node_counts[i] > 0) x[kIdle + i] = ev.image[kIdle + i];
        x[kTeEap] = ev.image[kTeEap];
        x[kTeRap] = ev.image[kTeRap];
    }

    double gamma = options.damping;
    double checkpoint_residual = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();
    for (long it = 1; it <= options.max_iterations; ++it) {
        Evaluation ev = evaluate(m, x, &diag);
        residual = (ev.image - x).cwiseAbs().maxCoeff();
        if (!std::isfinite(residual)) break;
        if (residual < options.tolerance) {
            SolutionState st = unpack(m, x, ev);
            st.iterations = it;
            st.final_damping = gamma;
            st.converged = true;
            st.diagnostics = std::move(diag);
            st.residual = fixed_point_residual(scenario, st);
            return st;
        }
        if (it % options.oscillation_window == 0) {
            if (residual >= checkpoint_residual)
                gamma = std::max(gamma / 2.0, options.min_damping);
            checkpoint_residual = residual;
        }
        x = (1.0 - gamma) * x + gamma * ev.image;
    }
    std::ostringstream os;
    os << "fixed point did not converge within " << options.max_iterations
       << " iterations (last residual " << residual << ")";
    throw ConvergenceError(os.str(), residual, options.max_iterations);
}

double fixed_point_residual(const Scenario& scenario, const SolutionState& state) {
    const Model m = build_model(scenario);
    const Iterate x = pack(state, scenario.phy.csma_slot);
    const Evaluation ev = evaluate(m, x, nullptr);
    Iterate diff = ev.image - x;
    // inactive UPs carry no iterate
    for (int i = 0; i < kNumPriorities; ++i)
        if (scenario.node_counts[i] <= 0)
            for (int block : {kTau, kRho, kFail, kIdle}) diff[block + i] = 0.0;
    return diff.cwiseAbs().maxCoeff();
}

double StationaryTable::total() const {
    double sum = b_empty;
    for (const auto& row : b)
        for (double v : row) sum += v;
    return sum;
}

StationaryTable stationary_distribution(const UserPriorityParams& up,
                                        const SolutionState& solution) {
    if (!solution.converged)
        throw Error(ErrorKind::StaleState, "stationary distribution needs a converged solution");
    const int i = up.priority_index;
    StationaryTable t;
    t.b.resize(up.num_stages());
    const double rho = solution.rho[i];
    if (rho <= 0.0) {
        for (int j = 0; j <= up.last_stage(); ++j) t.b[j].assign(cw_schedule(up, j) + 1, 0.0);
        t.b_empty = 1.0;
        return t;
    }
    const double p_fail = solution.p_fail[i];
    const double p_idle = solution.p_idle[i];
    const double b000 = solution.b000[i];
    double pj = 1.0;
    for (int j = 0; j <= up.last_stage(); ++j) {
        const int w = cw_schedule(up, j);
        auto& row = t.b[j];
        row.resize(w + 1);
        row[0] = pj * b000;
        for (int k = 1; k <= w; ++k)
            row[k] = static_cast<double>(w - k + 1) / w * pj / p_idle * b000;
        pj *= p_fail;
    }
    t.b_empty = (1.0 - rho) / rho * b000;
    return t;
}

}  // namespace wban
