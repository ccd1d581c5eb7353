// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed here.

#include "wban/compare.hpp"
#include "wban/csv.hpp"
#include "wban/error.hpp"
#include "wban/metrics.hpp"
#include "wban/simulator.hpp"
#include "wban/solver.hpp"
#include "wban/sweep.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace wban;
namespace fs = std::filesystem;

namespace {

constexpr double kResidualBound = 1e-10;
constexpr double kSolveSeconds = 1.0;
constexpr double kInitAgreement = 1e-6;
constexpr double kIdentityTol = 1e-9;
constexpr int kFuzzScenarios = 1000;
constexpr int kA3Replications = 20;
constexpr double kA3Horizon = 60.0;
constexpr double kA4StableRel = 0.05;
constexpr double kA4DropRel = 0.50;
constexpr double kA5SpreadRel = 0.02;
constexpr double kA6Ratio = 2.0;
constexpr double kA7Target = 0.80, kA7Band = 0.10, kA7Flat = 0.10;
constexpr std::uint64_t kA8Events = 1'000'000;

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Keeps the first few failure notes so the summary line stays readable.
struct Notes {
    int failures = 0;
    std::string text;

    void fail(const std::string& what) {
        if (failures++ < 4) text += (text.empty() ? "" : "; ") + what;
    }
    Outcome outcome(const std::string& ok_detail) const {
        if (failures == 0) return {true, ok_detail};
        return {false, std::to_string(failures) + " failure(s): " + text};
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<SolutionState> solve_points(const SweepSpec& spec, const SolverOptions& opt = {}) {
    std::vector<SolutionState> out;
    for (double v : spec.values)
        out.push_back(solve_fixed_point(apply_sweep_value(spec.base, spec.swept, v), opt));
    return out;
}

std::vector<MetricsReport> metrics_points(const SweepSpec& spec) {
    std::vector<MetricsReport> out;
    for (double v : spec.values) {
        const Scenario s = apply_sweep_value(spec.base, spec.swept, v);
        out.push_back(analytical_metrics(solve_fixed_point(s), s));
    }
    return out;
}

// A1 -------------------------------------------------------------------------

double max_state_gap(const SolutionState& a, const SolutionState& b, double slot) {
    double gap = (a.tau - b.tau).abs().maxCoeff();
    gap = std::max(gap, (a.rho - b.rho).abs().maxCoeff());
    gap = std::max(gap, (a.p_fail - b.p_fail).abs().maxCoeff());
    gap = std::max(gap, (a.p_idle - b.p_idle).abs().maxCoeff());
    gap = std::max(gap, std::abs(a.t_e_eap - b.t_e_eap) / slot);
    gap = std::max(gap, std::abs(a.t_e_rap - b.t_e_rap) / slot);
    return gap;
}

Outcome a1_solver_soundness() {
    Notes notes;
    int points = 0;
    double worst_residual = 0.0, slowest = 0.0, worst_gap = 0.0;
    SolverOptions alt;
    alt.initial_tau = 0.3;
    for (const auto& name : {"fig5", "fig6", "fig7", "fig8", "fig9"}) {
        for (const SweepSpec& spec : preset(name)) {
            for (double v : spec.values) {
                const Scenario s = apply_sweep_value(spec.base, spec.swept, v);
                const std::string where =
                    fmt("%s %s=%g %s", name, std::string(to_string(spec.swept)).c_str(), v,
                        std::string(to_string(s.mechanism)).c_str());
                try {
                    const auto t0 = std::chrono::steady_clock::now();
                    const SolutionState a = solve_fixed_point(s);
                    const double dt =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                    const SolutionState b = solve_fixed_point(s, alt);
                    const double gap = max_state_gap(a, b, s.phy.csma_slot);
                    ++points;
                    worst_residual = std::max(worst_residual, a.residual);
                    slowest = std::max(slowest, dt);
                    worst_gap = std::max(worst_gap, gap);
                    if (!(a.residual < kResidualBound)) notes.fail(where + " residual");
                    if (dt >= kSolveSeconds) notes.fail(where + fmt(" took %.2fs", dt));
                    if (gap > kInitAgreement) notes.fail(where + fmt(" init gap %.2e", gap));
                } catch (const std::exception& e) {
                    notes.fail(where + ": " + e.what());
                }
            }
        }
    }
    return notes.outcome(fmt("%d points, max residual %.1e, slowest %.3fs, init gap %.1e", points,
                             worst_residual, slowest, worst_gap));
}

// A2 -------------------------------------------------------------------------

Scenario random_scenario(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> per_up(0, 8), payload(0, 255);
    Scenario s;
    for (int i = 0; i < kNumPriorities; ++i) s.node_counts[i] = per_up(rng);
    if (s.total_nodes() == 0) s.node_counts[std::uniform_int_distribution<int>(0, 7)(rng)] = 1;
    s.ber = u(rng) < 0.1 ? 0.0 : std::pow(10.0, -7.0 + 5.0 * u(rng));
    s.payload_bytes = payload(rng);
    s.eap1_len = u(rng) < 0.2 ? 0.0 : 0.25 * u(rng);
    s.rap1_len = 0.05 + 0.95 * u(rng);
    s.mechanism = u(rng) < 0.5 ? Mechanism::Basic : Mechanism::RtsCts;
    s.traffic = u(rng) < 0.5 ? Traffic::Saturated : Traffic::NonSaturated;
    for (int i = 0; i < kNumPriorities; ++i) s.arrival_rates[i] = 10.0 * u(rng);
    return s;
}

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

Outcome a2_identities() {
    std::mt19937_64 rng(20261016);
    Notes notes;
    int solved = 0;
    double worst = 0.0;
    for (int k = 0; k < kFuzzScenarios; ++k) {
        Scenario s = random_scenario(rng);
        while (s.total_nodes() > kMaxBanSize) s.node_counts /= 2;
        try {
            validate(s);
            // lock probabilities need the phases to hold an exchange; skip infeasible draws
            const auto ph = phase_layout(s);
            const auto d = exchange_durations(s.phy, s.mechanism, s.payload_bytes);
            if (ph.rap_slots < d.l_succ_slots + 64) {
                --k;
                continue;
            }
        } catch (const Error&) {
            --k;
            continue;
        }
        try {
            const SolutionState st = solve_fixed_point(s);
            ++solved;
            auto check = [&](double lhs, double rhs, const char* what, int i) {
                const double e = std::abs(lhs - rhs);
                worst = std::max(worst, e);
                if (e > kIdentityTol) notes.fail(fmt("#%d UP%d %s off by %.1e", k, i, what, e));
            };
            for (int i = 0; i < kNumPriorities; ++i) {
                if (!st.active(i)) continue;
                check(st.p_succ[i] + st.p_error[i], st.p_acce[i], "succ+error=acce", i);
                check(st.p_acce_rap[i] + st.p_coll_rap[i], 1.0, "acce+coll=1 (rap)", i);
                check(st.p_succ_rap[i] + st.p_error_rap[i], st.p_acce_rap[i], "rap split", i);
                if (i == kHighestPriority && st.phases.eap_slots > 0) {
                    check(st.p_acce_eap[i] + st.p_coll_eap[i], 1.0, "acce+coll=1 (eap)", i);
                    check(st.p_succ_eap[i] + st.p_error_eap[i], st.p_acce_eap[i], "eap split", i);
                }
                check(st.p_acce[i] + st.p_coll[i], 1.0, "acce+coll=1", i);
                check(st.p_fail[i], st.p_coll[i] + st.p_error[i], "fail=coll+error", i);
                check(stationary_distribution(s.up_table[i], st).total(), 1.0, "normalization", i);
                for (double p : {st.tau[i], st.rho[i], st.b000[i], st.p_idle[i], st.p_lock[i],
                                 st.p_fail[i], st.p_acce[i], st.p_succ[i], st.p_coll[i],
                                 st.p_error[i]})
                    if (!in_unit(p)) notes.fail(fmt("#%d UP%d probability %.3g", k, i, p));
            }
            for (double p : {st.p_tran_eap, st.p_tran_rap, st.p_idle_eap, st.p_idle_rap, st.per})
                if (!in_unit(p)) notes.fail(fmt("#%d channel probability %.3g", k, p));
        } catch (const std::exception& e) {
            notes.fail(fmt("#%d: %s", k, e.what()));
        }
    }
    return notes.outcome(fmt("%d scenarios, worst identity error %.1e", solved, worst));
}

// A3 -------------------------------------------------------------------------

Outcome a3_cross_validation() {
    Scenario s;  // 2 per UP, RTS/CTS, BER 2e-5, 100 B, 0.1 s + 0.8 s, saturated
    s.traffic = Traffic::Saturated;
    const SolutionState st = solve_fixed_point(s);
    const MetricsReport model = analytical_metrics(st, s);
    const auto runs = run_replications(s, 1, kA3Horizon, kA3Replications, 8);
    std::vector<MetricsReport> reports;
    for (const auto& r : runs) reports.push_back(sim_metrics(r, s));
    const ReplicationSummary sim = summarize(reports);

    const DeviationReport rep = compare({{"base", model}}, {{"base", sim.mean}});
    Notes notes;
    for (const Deviation& d : rep.entries)
        if (!d.pass)
            notes.fail(fmt("UP%d %s model %.4g sim %.4g", d.up, to_string(d.metric), d.analytical,
                           d.simulated));
    return notes.outcome(fmt("%d gated comparisons within band", static_cast<int>(rep.entries.size() * 3 / 4)));
}

// A4 -------------------------------------------------------------------------

Outcome a4_ber_trend() {
    SweepSpec spec = preset("fig6").front();
    spec.values = {0.0, 2e-4, 1e-2};
    const auto m = metrics_points(spec);
    Notes notes;
    double worst_stable = 0.0, weakest_drop = 1.0;
    for (int i = 0; i < kNumPriorities; ++i) {
        const double r0 = m[0].reliability[i], r_mid = m[1].reliability[i], r_hi = m[2].reliability[i];
        const double stable = std::abs(r_mid - r0) / r0;
        const double drop = (r0 - r_hi) / r0;
        worst_stable = std::max(worst_stable, stable);
        weakest_drop = std::min(weakest_drop, drop);
        if (stable > kA4StableRel)
            notes.fail(fmt("UP%d R %.4f -> %.4f at BER 2e-4 (%.1f%%)", i, r0, r_mid, 100 * stable));
        if (!(drop > kA4DropRel)) notes.fail(fmt("UP%d drop at BER 1e-2 only %.1f%%", i, 100 * drop));
    }
    return notes.outcome(fmt("max change to 2e-4 %.1f%%, min drop at 1e-2 %.1f%%",
                             100 * worst_stable, 100 * weakest_drop));
}

// A5 -------------------------------------------------------------------------

Outcome a5_payload_trend() {
    SweepSpec spec = preset("fig7").front();
    spec.values.clear();
    for (int b = 50; b <= 250; b += 10) spec.values.push_back(b);
    const auto m = metrics_points(spec);
    Notes notes;
    double worst_spread = 0.0;
    for (int i = 0; i < kNumPriorities; ++i) {
        double lo = 1.0, hi = 0.0;
        for (const auto& r : m) {
            lo = std::min(lo, r.reliability[i]);
            hi = std::max(hi, r.reliability[i]);
        }
        const double spread = (hi - lo) / hi;
        worst_spread = std::max(worst_spread, spread);
        if (!(spread < kA5SpreadRel))
            notes.fail(fmt("UP%d reliability spread %.2f%%", i, 100 * spread));
        for (std::size_t k = 1; k < m.size(); ++k)
            if (!(m[k].throughput[i] > m[k - 1].throughput[i]))
                notes.fail(fmt("UP%d throughput not increasing at %g B", i, spec.values[k]));
    }
    return notes.outcome(fmt("max reliability spread %.2f%%, throughput increasing",
                             100 * worst_spread));
}

// A6 -------------------------------------------------------------------------

Outcome a6_prioritization() {
    const SweepSpec spec = preset("fig8").front();  // EAP1 0.1 s, RAP1 0.1 .. 0.8 s
    const auto m = metrics_points(spec);
    Notes notes;
    const double s7 = m[0].throughput[7];
    const double others = m[0].throughput.head<7>().maxCoeff();
    if (!(s7 >= kA6Ratio * others)) notes.fail(fmt("S7/S_max(i<7) = %.2f at rap1 0.1 s", s7 / others));
    double prev_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double gap = m[k].throughput[7] - m[k].throughput.head<7>().maxCoeff();
        if (gap > prev_gap) notes.fail(fmt("gap grows at rap1 %.1f s", spec.values[k]));
        prev_gap = gap;
    }
    return notes.outcome(fmt("S7/S_max(i<7) = %.2f at rap1 0.1 s, gap nonincreasing", s7 / others));
}

// A7 -------------------------------------------------------------------------

Outcome a7_density_trend() {
    const auto specs = preset("fig9");
    std::vector<std::vector<MetricsReport>> by_mech;
    for (const auto& spec : specs) by_mech.push_back(metrics_points(spec));
    const auto& n = specs.front().values;
    Notes notes;
    double r7_64 = 0.0;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const auto& m = by_mech[k];
        const bool rts = specs[k].base.mechanism == Mechanism::RtsCts;
        const char* mech = rts ? "rtscts" : "basic";
        const double flat_until = rts ? 32 : 24;
        for (std::size_t p = 0; p < n.size(); ++p) {
            if (!(m[p].reliability[7] >= m[p].reliability.head<7>().maxCoeff()))
                notes.fail(fmt("%s n=%g UP7 not most reliable", mech, n[p]));
            if (!(m[p].delay[7] <= m[p].delay.head<7>().minCoeff()))
                notes.fail(fmt("%s n=%g UP7 not fastest", mech, n[p]));
        }
        std::size_t last_flat = 0;
        for (std::size_t p = 0; p < n.size(); ++p)
            if (n[p] <= flat_until) last_flat = p;
        for (int i = 0; i < kHighestPriority; ++i) {
            const double r8 = m[0].reliability[i];
            for (std::size_t p = 0; p <= last_flat; ++p)
                if (std::abs(m[p].reliability[i] - r8) / r8 > kA7Flat)
                    notes.fail(fmt("%s UP%d not flat at n=%g", mech, i, n[p]));
            if (!(m.back().reliability[i] < (1.0 - kA7Flat) * m[last_flat].reliability[i]))
                notes.fail(fmt("%s UP%d does not degrade past n=%g", mech, i, flat_until));
        }
        if (rts) r7_64 = m.back().reliability[7];
    }
    if (std::abs(r7_64 - kA7Target) > kA7Band) notes.fail(fmt("R7(64, rtscts) = %.3f", r7_64));
    const auto& basic = by_mech[0];
    const auto& rts = by_mech[1];
    for (std::size_t p = 0; p < n.size(); ++p) {
        if (n[p] < 48) continue;
        for (int i = 0; i < kHighestPriority; ++i)
            if (!(rts[p].reliability[i] > basic[p].reliability[i]))
                notes.fail(fmt("n=%g UP%d rtscts not above basic", n[p], i));
    }
    return notes.outcome(fmt("R7(64, rtscts) = %.3f", r7_64));
}

// A8 -------------------------------------------------------------------------

Outcome a8_determinism() {
    Notes notes;
    std::uint64_t events = 0;
    AuditCounters audit;
    int runs = 0;
    for (auto mech : {Mechanism::RtsCts, Mechanism::Basic}) {
        for (auto traffic : {Traffic::Saturated, Traffic::NonSaturated}) {
            Scenario s;
            s.mechanism = mech;
            s.traffic = traffic;
            s.node_counts.setConstant(4);
            SimOptions o;
            o.seed = 77 + runs;
            o.horizon = 300.0;
            const SimStats a = run_simulation(s, o);
            const SimStats b = run_simulation(s, o);
            ++runs;
            if (!(a == b))
                notes.fail(fmt("%s/%s not reproducible", std::string(to_string(mech)).c_str(),
                               std::string(to_string(traffic)).c_str()));
            events += a.events;
            audit.forbidden_phase_tx += a.audit.forbidden_phase_tx;
            audit.boundary_overruns += a.audit.boundary_overruns;
            audit.invalid_decrements += a.audit.invalid_decrements;
            audit.window_rule_violations += a.audit.window_rule_violations;
            audit.counter_range_violations += a.audit.counter_range_violations;
        }
    }
    if (events < kA8Events) notes.fail(fmt("only %llu events", static_cast<unsigned long long>(events)));
    if (audit.total() != 0)
        notes.fail(fmt("audit: %llu forbidden-phase, %llu overruns, %llu window-rule",
                       static_cast<unsigned long long>(audit.forbidden_phase_tx),
                       static_cast<unsigned long long>(audit.boundary_overruns),
                       static_cast<unsigned long long>(audit.window_rule_violations)));
    return notes.outcome(fmt("%d runs bit-identical, %llu events, 0 audit violations", runs,
                             static_cast<unsigned long long>(events)));
}

// A9 -------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome a9_reproduce() {
    const fs::path dir = fs::temp_directory_path() / "wban_acceptance";
    fs::create_directories(dir);
    Notes notes;
    std::size_t rows = 0;
    for (const auto& name : preset_names()) {
        std::string first;
        for (int pass = 0; pass < 2; ++pass) {
            const fs::path out = dir / (name + "_" + std::to_string(pass) + ".csv");
            const std::string cmd = std::string(WBAN_CLI) + " reproduce " + name +
                                    " --mode analytical --out " + out.string() + " 2>/dev/null";
            const int status = std::system(cmd.c_str());
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
                notes.fail(name + " exited with failure");
                break;
            }
            const std::string text = slurp(out);
            if (pass == 0) {
                first = text;
                try {
                    std::istringstream in(text);
                    const auto table = read_csv(in);
                    std::size_t expected = 0;
                    for (const auto& spec : preset(name))
                        expected += spec.values.size() * (spec.base.node_counts > 0).count();
                    if (table.size() != expected) notes.fail(name + " row count");
                    for (const auto& r : table)
                        if (r.status != "ok") notes.fail(name + " has failed rows");
                    if (to_csv(table) != text) notes.fail(name + " does not round-trip");
                    rows += table.size();
                } catch (const std::exception& e) {
                    notes.fail(name + ": " + e.what());
                }
            } else if (text != first) {
                notes.fail(name + " output differs between runs");
            }
        }
    }
    return notes.outcome(fmt("8 presets, %zu rows, byte-identical reruns", rows));
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"A1 solver soundness", a1_solver_soundness},
        {"A2 exact identities", a2_identities},
        {"A3 model vs simulation", a3_cross_validation},
        {"A4 BER trend", a4_ber_trend},
        {"A5 payload trend", a5_payload_trend},
        {"A6 UP7 prioritization", a6_prioritization},
        {"A7 node-density trend", a7_density_trend},
        {"A8 simulator determinism", a8_determinism},
        {"A9 CSV and presets", a9_reproduce},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%-26s %s  %s\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
