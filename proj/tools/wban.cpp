// Command-line front end: solve, sweep, simulate, compare, reproduce.

#include "wban/compare.hpp"
#include "wban/config.hpp"
#include "wban/csv.hpp"
#include "wban/error.hpp"
#include "wban/plot.hpp"
#include "wban/simulator.hpp"
#include "wban/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace wban;

enum Exit { kOk = 0, kOther = 1, kParse = 2, kValidation = 3, kConvergence = 4, kReport = 5 };

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Parse: return kParse;
        case ErrorKind::Convergence: return kConvergence;
        case ErrorKind::Report: return kReport;
        case ErrorKind::Validation:
        case ErrorKind::Configuration:
        case ErrorKind::StageRange:
        case ErrorKind::Domain:
        case ErrorKind::InfeasiblePhase: return kValidation;
        default: return kOther;
    }
}

struct Common {
    std::string config;
    std::string out;
    std::string mode = "analytical";
    std::uint64_t seed = 1;
    int replications = 20;
    double horizon = 60.0;
    int parallel = 1;
    std::string trace;
    std::string plot;
    long max_iterations = SolverOptions{}.max_iterations;
};

Config load(const Common& c) {
    if (c.config.empty()) return Config{};
    return load_config(c.config);
}

RunOptions run_options(const Common& c) {
    RunOptions o;
    const auto mode = parse_run_mode(c.mode);
    if (!mode) throw Error(ErrorKind::Validation, "mode must be analytical, sim or both");
    o.mode = *mode;
    o.horizon = c.horizon;
    o.parallel = c.parallel;
    o.solver.max_iterations = c.max_iterations;
    return o;
}

void emit(const ResultTable& table, const Common& c) {
    if (c.out.empty()) {
        write_csv(std::cout, table);
    } else {
        std::ofstream f(c.out);
        if (!f) throw Error(ErrorKind::Configuration, "cannot write '" + c.out + "'");
        write_csv(f, table);
    }
    if (!c.plot.empty())
        for (const auto& path : write_plots(table, c.plot)) std::cerr << "wrote " << path << '\n';
}

std::string cell(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", *v);
    return buf;
}

void print_summary(const ResultTable& table) {
    std::printf("%-4s %-12s %-12s %-12s %-12s\n", "UP", "R", "S", "E[J]", "D[s]");
    for (const ResultRow& r : table)
        std::printf("%-4d %-12s %-12s %-12s %-12s\n", r.up, cell(r.model_reliability).c_str(),
                    cell(r.model_throughput).c_str(), cell(r.model_energy).c_str(),
                    cell(r.model_delay).c_str());
}

int cmd_solve(const Common& c) {
    const Config cfg = load(c);
    SolverOptions so;
    so.max_iterations = c.max_iterations;
    const SolutionState st = solve_fixed_point(cfg.scenario, so);
    for (const auto& msg : st.diagnostics.messages) std::cerr << "note: " << msg << '\n';
    std::cerr << "converged in " << st.iterations << " iterations, residual " << st.residual
              << '\n';
    const ResultTable table = solve_rows(cfg.scenario, so);
    if (c.out.empty()) {
        print_summary(table);
    } else {
        emit(table, c);
    }
    return kOk;
}

bool any_failed(const ResultTable& table) {
    for (const auto& r : table)
        if (r.status != "ok") return true;
    return false;
}

int cmd_sweep(const Common& c, const std::vector<std::string>& given) {
    const Config cfg = load(c);
    if (!cfg.sweep) throw Error(ErrorKind::Configuration, "config has no [sweep] section");
    SweepSpec spec = *cfg.sweep;
    auto was_given = [&](const std::string& flag) {
        return std::find(given.begin(), given.end(), flag) != given.end();
    };
    if (was_given("--replications")) spec.replications = c.replications;
    if (was_given("--seed")) spec.seed = c.seed;
    const ResultTable table = run_sweep(spec, run_options(c));
    emit(table, c);
    if (any_failed(table)) std::cerr << "some sweep points failed; see the status column\n";
    return kOk;
}

int cmd_simulate(const Common& c) {
    const Config cfg = load(c);
    std::ofstream trace_file;
    if (!c.trace.empty()) {
        if (c.replications != 1)
            throw Error(ErrorKind::Validation, "--trace needs --replications 1");
        trace_file.open(c.trace);
        if (!trace_file) throw Error(ErrorKind::Configuration, "cannot write '" + c.trace + "'");
        SimOptions so;
        so.seed = c.seed;
        so.horizon = c.horizon;
        so.trace = &trace_file;
        run_simulation(cfg.scenario, so);
    }
    SweepSpec spec;
    spec.base = cfg.scenario;
    spec.swept = SweptParameter::ArrivalRate;
    spec.values = {cfg.scenario.arrival_rates[0]};
    spec.replications = c.replications;
    spec.seed = c.seed;
    RunOptions o = run_options(c);
    o.mode = RunMode::Simulated;
    ResultTable table = run_sweep(spec, o);
    for (auto& r : table) {
        r.parameter = "none";
        r.value = 0.0;
    }
    emit(table, c);
    return any_failed(table) ? kOther : kOk;
}

void print_report(const DeviationReport& rep) {
    for (const Deviation& d : rep.entries)
        std::printf("%-28s UP%d %-12s model=%-12.6g sim=%-12.6g rel=%-10.4g %s\n", d.key.c_str(),
                    d.up, to_string(d.metric), d.analytical, d.simulated, d.relative,
                    !d.gated ? "info" : d.pass ? "ok" : "FAIL");
    std::printf("%s: %d gated deviation(s) outside tolerance\n", rep.pass ? "PASS" : "FAIL",
                rep.failures());
}

ResultTable read_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::Configuration, "cannot open '" + path + "'");
    return read_csv(f);
}

int cmd_compare(const Common& c, const std::string& a_csv, const std::string& s_csv) {
    ResultTable a, s;
    if (!a_csv.empty() || !s_csv.empty()) {
        if (a_csv.empty() || s_csv.empty())
            throw Error(ErrorKind::Validation, "--analytical and --simulated go together");
        a = read_table(a_csv);
        s = read_table(s_csv);
    } else {
        const Config cfg = load(c);
        SweepSpec spec;
        if (cfg.sweep) {
            spec = *cfg.sweep;
        } else {
            spec.base = cfg.scenario;
            spec.values = {cfg.scenario.arrival_rates[0]};
        }
        spec.replications = c.replications;
        spec.seed = c.seed;
        RunOptions o = run_options(c);
        o.mode = RunMode::Both;
        a = s = run_sweep(spec, o);
        if (!c.out.empty()) emit(a, c);
    }
    const DeviationReport rep = compare(analytical_set(a), simulated_set(s));
    print_report(rep);
    return rep.pass ? kOk : kReport;
}

int cmd_reproduce(const Common& c, const std::string& figure,
                  const std::vector<std::string>& given) {
    const auto specs = preset(figure);
    ResultTable table;
    for (SweepSpec spec : specs) {
        if (std::find(given.begin(), given.end(), "--replications") != given.end())
            spec.replications = c.replications;
        spec.seed = c.seed;
        const ResultTable part = run_sweep(spec, run_options(c));
        table.insert(table.end(), part.begin(), part.end());
    }
    emit(table, c);
    return kOk;
}

void add_common(CLI::App* app, Common& c, bool sim) {
    app->add_option("--config", c.config, "INI configuration file");
    app->add_option("--out", c.out, "write CSV here instead of stdout");
    app->add_option("--max-iterations", c.max_iterations, "solver iteration cap")
        ->check(CLI::PositiveNumber);
    if (!sim) return;
    app->add_option("--mode", c.mode, "analytical, sim or both")
        ->check(CLI::IsMember({"analytical", "sim", "simulated", "both"}));
    app->add_option("--seed", c.seed, "base RNG seed");
    app->add_option("--replications", c.replications, "DES replications per point")
        ->check(CLI::PositiveNumber);
    app->add_option("--horizon", c.horizon, "simulated seconds per replication")
        ->check(CLI::PositiveNumber);
    app->add_option("--parallel", c.parallel, "worker threads")->check(CLI::PositiveNumber);
    app->add_option("--plot", c.plot, "write SVG plots with this file prefix");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"WBAN CSMA/CA analytical model and slot-level simulator"};
    app.require_subcommand(1);
    Common c;
    std::string a_csv, s_csv, figure;

    auto* solve = app.add_subcommand("solve", "solve the analytical model for one scenario");
    add_common(solve, c, false);
    auto* sweep = app.add_subcommand("sweep", "run the [sweep] section of a config");
    add_common(sweep, c, true);
    auto* simulate = app.add_subcommand("simulate", "run DES replications of one scenario");
    add_common(simulate, c, true);
    simulate->add_option("--trace", c.trace, "per-event trace file (one replication)");
    auto* cmp = app.add_subcommand("compare", "model vs simulation deviation report");
    add_common(cmp, c, true);
    cmp->add_option("--analytical", a_csv, "CSV with model columns");
    cmp->add_option("--simulated", s_csv, "CSV with sim columns");
    auto* repro = app.add_subcommand("reproduce", "run a preset sweep");
    add_common(repro, c, true);
    repro->add_option("figure", figure, "fig5 ... fig12")->required()->check(
        CLI::IsMember(preset_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kParse;
    }

    std::vector<std::string> given;
    for (int i = 1; i < argc; ++i) given.emplace_back(argv[i]);

    try {
        if (*solve) return cmd_solve(c);
        if (*sweep) return cmd_sweep(c, given);
        if (*simulate) return cmd_simulate(c);
        if (*cmp) return cmd_compare(c, a_csv, s_csv);
        if (*repro) return cmd_reproduce(c, figure, given);
    } catch (const ParseError& e) {
        std::cerr << "parse error (line " << e.line() << "): " << e.what() << '\n';
        return kParse;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << " (residual " << e.last_residual() << " after "
                  << e.iterations() << " iterations)\n";
        return kConvergence;
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
    return kOther;
}
