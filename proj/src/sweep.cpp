#include "wban/sweep.hpp"

#include "wban/error.hpp"
#include "wban/metrics.hpp"
#include "wban/parallel.hpp"

#include <cmath>
#include <sstream>

namespace wban {

std::string_view to_string(SweptParameter p) {
    switch (p) {
        case SweptParameter::ArrivalRate: return "arrival_rate";
        case SweptParameter::Ber: return "ber";
        case SweptParameter::PayloadBytes: return "payload_bytes";
        case SweptParameter::Rap1Len: return "rap1";
        case SweptParameter::NodeCount: return "node_count";
        case SweptParameter::Mechanism: return "mechanism";
    }
    return "?";
}

std::optional<SweptParameter> parse_swept_parameter(std::string_view name) {
    for (auto p : {SweptParameter::ArrivalRate, SweptParameter::Ber, SweptParameter::PayloadBytes,
                   SweptParameter::Rap1Len, SweptParameter::NodeCount, SweptParameter::Mechanism})
        if (to_string(p) == name) return p;
    return std::nullopt;
}

std::optional<RunMode> parse_run_mode(std::string_view name) {
    if (name == "analytical") return RunMode::Analytical;
    if (name == "sim" || name == "simulated") return RunMode::Simulated;
    if (name == "both") return RunMode::Both;
    return std::nullopt;
}

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::Validation, msg); }

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

int active_priorities(const Scenario& s) {
    const int n = static_cast<int>((s.node_counts > 0).count());
    return n == 0 ? kNumPriorities : n;
}

}  // namespace

Scenario apply_sweep_value(const Scenario& base, SweptParameter p, double v) {
    Scenario s = base;
    std::ostringstream who;
    who << to_string(p) << " = " << v << ": ";
    switch (p) {
        case SweptParameter::ArrivalRate:
            s.arrival_rates.setConstant(v);
            break;
        case SweptParameter::Ber:
            s.ber = v;
            break;
        case SweptParameter::PayloadBytes:
            if (!is_integral(v) || v < 0) invalid(who.str() + "payload must be a whole byte count");
            s.payload_bytes = static_cast<int>(v);
            break;
        case SweptParameter::Rap1Len:
            s.rap1_len = v;
            break;
        case SweptParameter::NodeCount: {
            const int groups = active_priorities(base);
            if (!is_integral(v) || v < 0) invalid(who.str() + "node count must be a whole number");
            const long total = static_cast<long>(v);
            if (total % groups != 0)
                invalid(who.str() + "node count not divisible by the number of active UPs");
            const int per_up = static_cast<int>(total / groups);
            const bool all = (base.node_counts == 0).all();
            for (int i = 0; i < kNumPriorities; ++i)
                s.node_counts[i] = (all || base.node_counts[i] > 0) ? per_up : 0;
            break;
        }
        case SweptParameter::Mechanism:
            if (v == 0.0) {
                s.mechanism = Mechanism::Basic;
            } else if (v == 1.0) {
                s.mechanism = Mechanism::RtsCts;
            } else {
                invalid(who.str() + "mechanism values are 0 (basic) or 1 (rtscts)");
            }
            break;
    }
    return s;
}

void validate(const SweepSpec& spec) {
    if (spec.values.empty()) invalid("sweep needs at least one value");
    if (spec.replications < 1) invalid("replications must be >= 1");
    validate(spec.base);
    for (double v : spec.values) validate(apply_sweep_value(spec.base, spec.swept, v));
}

namespace {

void fill_model(ResultRow& row, const MetricsReport& m, const SolutionState& st) {
    const int i = row.up;
    row.model_reliability = m.reliability[i];
    row.model_throughput = m.throughput[i];
    row.model_energy = m.energy[i];
    row.model_energy_per_second = m.energy_per_second[i];
    row.model_delay = m.delay[i];
    row.iterations = st.iterations;
    row.residual = st.residual;
}

void fill_sim(ResultRow& row, const ReplicationSummary& sum) {
    const int i = row.up;
    row.replications = sum.replications;
    if (!sum.mean.available[i]) return;
    row.sim_reliability = sum.mean.reliability[i];
    row.sim_reliability_hw = sum.half_width.reliability[i];
    row.sim_throughput = sum.mean.throughput[i];
    row.sim_throughput_hw = sum.half_width.throughput[i];
    row.sim_energy = sum.mean.energy[i];
    row.sim_energy_hw = sum.half_width.energy[i];
    row.sim_delay = sum.mean.delay[i];
    row.sim_delay_hw = sum.half_width.delay[i];
}

void fill_deviation(ResultRow& row) {
    auto dev = [](const std::optional<double>& a, const std::optional<double>& s) {
        return a && s ? std::optional<double>(relative_deviation(*a, *s)) : std::nullopt;
    };
    row.dev_reliability = dev(row.model_reliability, row.sim_reliability);
    row.dev_throughput = dev(row.model_throughput, row.sim_throughput);
    row.dev_energy = dev(row.model_energy, row.sim_energy);
    row.dev_delay = dev(row.model_delay, row.sim_delay);
}

std::string failure_status(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e))
        return std::string("error:") + to_string(err->kind()) + ": " + err->what();
    return std::string("error: ") + e.what();
}

struct PointResult {
    Scenario scenario;
    std::optional<SolutionState> solution;
    std::optional<MetricsReport> model;
    std::vector<MetricsReport> sims;
    std::string status = "ok";
};

}  // namespace

ResultTable run_sweep(const SweepSpec& spec, const RunOptions& opt) {
    if (spec.values.empty()) invalid("sweep needs at least one value");
    const bool analytical = opt.mode != RunMode::Simulated;
    const bool simulated = opt.mode != RunMode::Analytical;

    std::vector<PointResult> points(spec.values.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
        try {
            points[k].scenario = apply_sweep_value(spec.base, spec.swept, spec.values[k]);
            validate(points[k].scenario);
        } catch (const std::exception& e) {
            points[k].scenario = spec.base;
            points[k].status = failure_status(e);
        }
    }

    if (analytical) {
        parallel_for(points.size(), opt.parallel, [&](std::size_t k) {
            PointResult& p = points[k];
            if (p.status != "ok") return;
            try {
                p.solution = solve_fixed_point(p.scenario, opt.solver);
                p.model = analytical_metrics(*p.solution, p.scenario);
            } catch (const std::exception& e) {
                p.status = failure_status(e);
            }
        });
    }

    if (simulated) {
        const auto reps = static_cast<std::size_t>(spec.replications);
        for (auto& p : points) p.sims.resize(reps);
        std::vector<std::string> sim_status(points.size() * reps);
        parallel_for(points.size() * reps, opt.parallel, [&](std::size_t item) {
            const std::size_t k = item / reps;
            const std::size_t r = item % reps;
            PointResult& p = points[k];
            if (p.status != "ok") return;
            try {
                SimOptions so;
                so.seed = replication_seed(spec.seed + k, r);
                so.horizon = opt.horizon;
                p.sims[r] = sim_metrics(run_simulation(p.scenario, so), p.scenario);
            } catch (const std::exception& e) {
                sim_status[item] = failure_status(e);
            }
        });
        for (std::size_t item = 0; item < sim_status.size(); ++item)
            if (!sim_status[item].empty() && points[item / reps].status == "ok")
                points[item / reps].status = sim_status[item];
    }

    ResultTable table;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const PointResult& p = points[k];
        std::optional<ReplicationSummary> summary;
        if (simulated && p.status == "ok") summary = summarize(p.sims);
        for (int i = 0; i < kNumPriorities; ++i) {
            if (p.scenario.node_counts[i] <= 0) continue;
            ResultRow row;
            row.parameter = std::string(to_string(spec.swept));
            row.value = spec.values[k];
            row.mechanism = p.scenario.mechanism;
            row.up = i;
            row.status = p.status;
            if (p.status == "ok") {
                if (analytical) fill_model(row, *p.model, *p.solution);
                if (summary) fill_sim(row, *summary);
                if (analytical && simulated) fill_deviation(row);
            }
            table.push_back(std::move(row));
        }
    }
    return table;
}

ResultTable solve_rows(const Scenario& scenario, const SolverOptions& options) {
    const SolutionState st = solve_fixed_point(scenario, options);
    const MetricsReport m = analytical_metrics(st, scenario);
    ResultTable table;
    for (int i = 0; i < kNumPriorities; ++i) {
        if (!st.active(i)) continue;
        ResultRow row;
        row.parameter = "none";
        row.mechanism = scenario.mechanism;
        row.up = i;
        fill_model(row, m, st);
        table.push_back(std::move(row));
    }
    return table;
}

std::vector<std::string> preset_names() {
    return {"fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12"};
}

namespace {

std::vector<double> range(double from, double to, double step) {
    std::vector<double> v;
    const long n = std::lround((to - from) / step);
    for (long k = 0; k <= n; ++k) v.push_back(from + k * step);
    return v;
}

// 16 nodes, two per UP, 100 B payload, EAP1 0.1 s, RAP1 0.8 s, BER 2e-5, RTS/CTS
Scenario general_scenario() {
    Scenario s;
    s.node_counts.setConstant(2);
    s.payload_bytes = 100;
    s.eap1_len = 0.1;
    s.rap1_len = 0.8;
    s.ber = 2e-5;
    s.mechanism = Mechanism::RtsCts;
    s.arrival_rates.setConstant(2.0);
    return s;
}

}  // namespace

std::vector<SweepSpec> preset(std::string_view name) {
    SweepSpec spec;
    spec.base = general_scenario();
    if (name == "fig5") {
        spec.base.traffic = Traffic::NonSaturated;
        spec.swept = SweptParameter::ArrivalRate;
        spec.values = range(0.5, 4.0, 0.5);
        return {spec};
    }
    if (name == "fig6") {
        spec.base.traffic = Traffic::Saturated;
        spec.swept = SweptParameter::Ber;
        spec.values = {0.0, 1e-5, 2e-5, 5e-5, 1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2};
        return {spec};
    }
    if (name == "fig7") {
        spec.base.traffic = Traffic::Saturated;
        spec.swept = SweptParameter::PayloadBytes;
        spec.values = range(0.0, 260.0, 10.0);
        return {spec};
    }
    if (name == "fig8") {
        spec.base.traffic = Traffic::NonSaturated;
        spec.base.arrival_rates.setConstant(2.0);
        spec.swept = SweptParameter::Rap1Len;
        spec.values = range(0.1, 0.8, 0.1);
        return {spec};
    }
    if (name == "fig9" || name == "fig10" || name == "fig11" || name == "fig12") {
        spec.base.traffic = Traffic::NonSaturated;
        spec.base.arrival_rates.setConstant(0.5);
        spec.swept = SweptParameter::NodeCount;
        spec.values = range(8.0, 64.0, 8.0);
        SweepSpec basic = spec;
        basic.base.mechanism = Mechanism::Basic;
        SweepSpec rts = spec;
        rts.base.mechanism = Mechanism::RtsCts;
        return {basic, rts};
    }
    throw Error(ErrorKind::Validation, "unknown preset '" + std::string(name) + "'");
}

}  // namespace wban
