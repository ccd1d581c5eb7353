#include <doctest.h>

#include "wban/error.hpp"
#include "wban/simulator.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace wban;
using doctest::Approx;

namespace {

SimStats run(const Scenario& s, std::uint64_t seed, double horizon = 12.0) {
    SimOptions o;
    o.seed = seed;
    o.horizon = horizon;
    return run_simulation(s, o);
}

}  // namespace

TEST_CASE("exchange occupies whole slots including the trailing SIFS") {
    const PhyMacConfig phy;
    const auto basic = exchange_durations(phy, Mechanism::Basic, 100);
    CHECK(exchange_slots(basic.t_succ, phy) == 17);
    const auto rts = exchange_durations(phy, Mechanism::RtsCts, 100);
    CHECK(exchange_slots(rts.t_succ, phy) == 27);
    CHECK(exchange_slots(rts.t_coll, phy) == 11);
}

TEST_CASE("same seed, same stats; different seed, different stats") {
    const Scenario s;
    const auto a = run(s, 42);
    const auto b = run(s, 42);
    const auto c = run(s, 43);
    CHECK(a == b);
    CHECK_FALSE(a == c);
}

TEST_CASE("protocol audits stay clean") {
    for (auto mech : {Mechanism::Basic, Mechanism::RtsCts}) {
        for (auto traffic : {Traffic::Saturated, Traffic::NonSaturated}) {
            Scenario s;
            s.mechanism = mech;
            s.traffic = traffic;
            const auto st = run(s, 5);
            CAPTURE(to_string(mech));
            CAPTURE(to_string(traffic));
            CHECK(st.audit.total() == 0);
            CHECK(st.events > 0);
        }
    }
}

TEST_CASE("frame accounting is consistent") {
    Scenario s;
    s.traffic = Traffic::NonSaturated;
    s.arrival_rates.setConstant(5.0);
    const auto st = run(s, 9, 30.0);
    for (int i = 0; i < kNumPriorities; ++i) {
        CHECK(st.successes[i] + st.drops[i] <= st.frames_generated[i]);
        CHECK(st.attempts[i] == st.successes[i] + st.collisions[i] + st.error_transmissions[i]);
        CHECK(st.energy_idle[i] > 0.0);
    }
    CHECK(st.idle_time + st.busy_time == Approx(st.simulated_time).epsilon(1e-9));
    CHECK(st.superframes_elapsed >= 30);
}

TEST_CASE("single-frame buffer suppresses arrivals under heavy load") {
    Scenario s;
    s.traffic = Traffic::NonSaturated;
    s.arrival_rates.setConstant(200.0);
    const auto st = run(s, 3);
    std::uint64_t suppressed = 0;
    for (auto v : st.suppressed_arrivals) suppressed += v;
    CHECK(suppressed > 0);
}

TEST_CASE("zero BER means no error outcomes") {
    Scenario s;
    s.ber = 0.0;
    const auto st = run(s, 2);
    for (auto v : st.error_transmissions) CHECK(v == 0);
}

TEST_CASE("metrics from a run") {
    const Scenario s;
    const auto st = run(s, 11, 30.0);
    const auto m = sim_metrics(st, s);
    CHECK(m.available.all());
    for (int i = 0; i < kNumPriorities; ++i) {
        CHECK(m.reliability[i] >= 0.0);
        CHECK(m.reliability[i] <= 1.0);
        CHECK(m.throughput[i] >= 0.0);
        CHECK(m.delay[i] > 0.0);
    }
    CHECK(m.throughput.sum() < 1.0);
    CHECK(m.throughput[7] > m.throughput[0]);
}

TEST_CASE("replications") {
    std::set<std::uint64_t> seeds;
    for (std::uint64_t k = 0; k < 100; ++k) seeds.insert(replication_seed(1, k));
    CHECK(seeds.size() == 100);

    const Scenario s;
    const auto serial = run_replications(s, 4, 12.0, 4, 1);
    const auto threaded = run_replications(s, 4, 12.0, 4, 4);
    CHECK(serial == threaded);

    std::vector<MetricsReport> reports;
    for (const auto& st : serial) reports.push_back(sim_metrics(st, s));
    const auto sum = summarize(reports);
    CHECK(sum.replications == 4);
    CHECK(sum.half_width.reliability[0] >= 0.0);

    const auto same = summarize({reports[0], reports[0], reports[0]});
    CHECK(same.half_width.throughput[3] == 0.0);
    CHECK(same.mean.throughput[3] == Approx(reports[0].throughput[3]));
}

TEST_CASE("trace lines") {
    const Scenario s;
    std::ostringstream trace;
    SimOptions o;
    o.horizon = 10.0;
    o.trace = &trace;
    run_simulation(s, o);
    std::istringstream in(trace.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    std::istringstream fields(line);
    double t;
    int node, up, stage, counter;
    std::string event;
    CHECK(static_cast<bool>(fields >> t >> node >> up >> event >> stage >> counter));
}

TEST_CASE("infeasible simulation settings") {
    Scenario s;
    auto kind = [&](double horizon) {
        try {
            run(s, 1, horizon);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Report;
    };
    CHECK(kind(1.0) == ErrorKind::Configuration);
    s.rap1_len = 2e-3;  // shorter than one exchange
    CHECK(kind(60.0) == ErrorKind::Configuration);
}
