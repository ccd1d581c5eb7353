#ifndef WBAN_METRICS_HPP
#define WBAN_METRICS_HPP

#include "wban/core_model.hpp"
#include "wban/solver.hpp"

namespace wban {

using PerUpMask = Eigen::Array<bool, kNumPriorities, 1>;

/// Per-UP performance figures. Entries for UPs without nodes, or without
/// resolved frames in a simulation, are NaN and cleared in `available`.
struct MetricsReport {
    PerUp reliability = PerUp::Constant(NAN);
    PerUp throughput = PerUp::Constant(NAN);
    PerUp energy = PerUp::Constant(NAN);             // J per expected state
    PerUp energy_per_second = PerUp::Constant(NAN);  // W
    PerUp delay = PerUp::Constant(NAN);              // s
    PerUp t_wait = PerUp::Constant(NAN);             // s
    PerUpMask available = PerUpMask::Constant(false);
    double x_eap = 0.0;  // expected states per EAP
    double x_rap = 0.0;  // expected states per RAP
};

double reliability(const UserPriorityParams& up, double p_fail);

PerUp normalized_throughput(const SolutionState& solution, const Scenario& scenario);

/// Energy of one node over one expected state, split by what happened in it.
struct EnergyBreakdown {
    double idle = 0.0;
    double succ = 0.0;
    double coll = 0.0;
    double error = 0.0;

    double total() const { return idle + succ + coll + error; }
};

EnergyBreakdown energy_consumption(int up_index, const SolutionState& solution,
                                   const Scenario& scenario, const ExchangeDurations& durations);

double waiting_time(int up_index, const Scenario& scenario);

/// Mean time from frame generation to delivery or drop.
double average_access_delay(const UserPriorityParams& up, double p_fail, double t_e,
                            double t_wait);

MetricsReport analytical_metrics(const SolutionState& solution, const Scenario& scenario);

}  // namespace wban

#endif  // WBAN_METRICS_HPP
