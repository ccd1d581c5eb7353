#ifndef WBAN_SWEEP_HPP
#define WBAN_SWEEP_HPP

#include "wban/compare.hpp"
#include "wban/core_model.hpp"
#include "wban/simulator.hpp"
#include "wban/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wban {

enum class SweptParameter { ArrivalRate, Ber, PayloadBytes, Rap1Len, NodeCount, Mechanism };

std::string_view to_string(SweptParameter p);
std::optional<SweptParameter> parse_swept_parameter(std::string_view name);

struct SweepSpec {
    Scenario base;
    SweptParameter swept = SweptParameter::ArrivalRate;
    std::vector<double> values;
    int replications = 20;
    std::uint64_t seed = 1;
};

void validate(const SweepSpec& spec);

/// The base scenario with one swept value applied. NodeCount splits the total
/// evenly over the UPs that have nodes in the base (all eight if none do).
Scenario apply_sweep_value(const Scenario& base, SweptParameter p, double value);

enum class RunMode { Analytical, Simulated, Both };

std::optional<RunMode> parse_run_mode(std::string_view name);

struct RunOptions {
    RunMode mode = RunMode::Analytical;
    double horizon = 60.0;
    int parallel = 1;
    SolverOptions solver;
    Tolerances tolerances;
};

/// One (swept value, UP) cell. Cells a mode does not produce stay empty.
struct ResultRow {
    std::string parameter;
    double value = 0.0;
    Mechanism mechanism = Mechanism::RtsCts;
    int up = 0;
    std::string status = "ok";

    std::optional<double> model_reliability, model_throughput, model_energy,
        model_energy_per_second, model_delay;
    std::optional<long> iterations;
    std::optional<double> residual;

    std::optional<double> sim_reliability, sim_reliability_hw;
    std::optional<double> sim_throughput, sim_throughput_hw;
    std::optional<double> sim_energy, sim_energy_hw;
    std::optional<double> sim_delay, sim_delay_hw;
    std::optional<int> replications;

    std::optional<double> dev_reliability, dev_throughput, dev_energy, dev_delay;

    bool operator==(const ResultRow&) const = default;
};

using ResultTable = std::vector<ResultRow>;

/// Rows come out in sweep order, UP ascending within a value. A failing point
/// is marked in its rows' status and the sweep carries on.
ResultTable run_sweep(const SweepSpec& spec, const RunOptions& options);

/// Rows for one analytical solve, as a sweep with no swept parameter.
ResultTable solve_rows(const Scenario& scenario, const SolverOptions& options = {});

std::vector<std::string> preset_names();

/// Preset sweeps fig5 ... fig12.
/// fig9-fig12 share the node-count sweep and return it once per mechanism.
std::vector<SweepSpec> preset(std::string_view name);

}  // namespace wban

#endif  // WBAN_SWEEP_HPP
