#ifndef WBAN_SOLVER_HPP
#define WBAN_SOLVER_HPP

#include "wban/core_model.hpp"

#include <vector>

namespace wban {

struct ChannelProbs {
    double p_tran_eap = 0.0;
    double p_tran_rap = 0.0;
    double p_idle_eap = 1.0;
    double p_idle_rap = 1.0;
};

/// Probability that at least one node transmits in a slot of each phase.
/// UPs with no nodes drop out of the products.
ChannelProbs phase_transmission_probs(const PerUp& taus, const NodeCounts& node_counts);

/// Conditional probabilities seen by one node. The `_eap` components are only
/// meaningful for UP7; for other priorities they stay zero and the overall value
/// equals the RAP component.
struct NodeProbs {
    double p_idle = 0.0, p_idle_eap = 0.0, p_idle_rap = 0.0;
    double p_acce = 0.0, p_acce_eap = 0.0, p_acce_rap = 0.0;
    double p_succ = 0.0, p_succ_eap = 0.0, p_succ_rap = 0.0;
    double p_coll = 0.0, p_coll_eap = 0.0, p_coll_rap = 0.0;
    double p_error = 0.0, p_error_eap = 0.0, p_error_rap = 0.0;
    double p_fail = 0.0;
};

NodeProbs node_conditional_probs(int up_index, const PerUp& taus, const NodeCounts& node_counts,
                                 double per, double p_lock, const PhaseLayout& phases,
                                 Diagnostics* diag = nullptr);

struct StateTimes {
    double t_e_eap = 0.0;
    double t_e_rap = 0.0;
    PerUp t_e = PerUp::Zero();
};

StateTimes expected_state_time(const ChannelProbs& channel, const std::vector<NodeProbs>& nodes,
                               const NodeCounts& node_counts, const ExchangeDurations& durations,
                               double csma_slot, const PhaseLayout& phases);

double queue_nonempty_prob(double lambda, double t_e, Traffic traffic);

struct BackoffEntry {
    double b000 = 0.0;
    double tau = 0.0;
};

/// Normalised head-of-chain probability and the attempt probability it implies.
BackoffEntry tau_from_state(const UserPriorityParams& up, double p_fail, double p_idle,
                            double rho);

struct SolutionState {
    NodeCounts node_counts = NodeCounts::Zero();

    PerUp tau = PerUp::Zero();
    PerUp rho = PerUp::Zero();
    PerUp b000 = PerUp::Zero();
    PerUp p_idle = PerUp::Zero();
    PerUp p_lock = PerUp::Zero();
    PerUp p_fail = PerUp::Zero();

    PerUp p_acce = PerUp::Zero(), p_acce_eap = PerUp::Zero(), p_acce_rap = PerUp::Zero();
    PerUp p_succ = PerUp::Zero(), p_succ_eap = PerUp::Zero(), p_succ_rap = PerUp::Zero();
    PerUp p_coll = PerUp::Zero(), p_coll_eap = PerUp::Zero(), p_coll_rap = PerUp::Zero();
    PerUp p_error = PerUp::Zero(), p_error_eap = PerUp::Zero(), p_error_rap = PerUp::Zero();
    PerUp t_e = PerUp::Zero();

    double p_tran_eap = 0.0, p_tran_rap = 0.0;
    double p_idle_eap = 1.0, p_idle_rap = 1.0;
    double t_e_eap = 0.0, t_e_rap = 0.0;

    double per = 0.0;
    ExchangeDurations durations;
    PhaseLayout phases;

    long iterations = 0;
    double residual = 0.0;
    double final_damping = 0.0;
    bool converged = false;
    Diagnostics diagnostics;

    bool active(int up) const { return node_counts[up] > 0; }
};

struct SolverOptions {
    double initial_tau = 1e-2;
    double damping = 0.1;
    double min_damping = 1e-3;
    double tolerance = 1e-10;
    long max_iterations = 200000;
    long oscillation_window = 1000;
};

/// Damped fixed-point solve of the coupled per-UP chain system. Throws
/// ConvergenceError when the residual has not dropped below tolerance in time.
SolutionState solve_fixed_point(const Scenario& scenario, const SolverOptions& options = {});

/// Max absolute change of (tau, rho, p_fail, p_idle, t_e in slots) under one
/// undamped re-evaluation of the system at `state`.
double fixed_point_residual(const Scenario& scenario, const SolutionState& state);

/// b[j][k] for k = 0..W_j of one UP's chain plus the empty state.
struct StationaryTable {
    std::vector<std::vector<double>> b;
    double b_empty = 0.0;

    double total() const;
};

StationaryTable stationary_distribution(const UserPriorityParams& up,
                                        const SolutionState& solution);

}  // namespace wban

#endif  // WBAN_SOLVER_HPP
