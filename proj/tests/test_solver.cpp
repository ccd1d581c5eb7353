#include <doctest.h>

#include "wban/error.hpp"
#include "wban/solver.hpp"

#include <cmath>
#include <random>

using namespace wban;
using doctest::Approx;

TEST_CASE("queue occupancy") {
    CHECK(queue_nonempty_prob(2.0, 500e-6, Traffic::NonSaturated) ==
          Approx(9.995001666250083e-4).epsilon(1e-13));
    CHECK(queue_nonempty_prob(2.0, 500e-6, Traffic::Saturated) == 1.0);
    CHECK(queue_nonempty_prob(0.0, 500e-6, Traffic::NonSaturated) == 0.0);
}

TEST_CASE("channel and node probabilities for a single active UP") {
    PerUp taus = PerUp::Zero();
    taus[0] = 0.2;
    NodeCounts counts = NodeCounts::Zero();
    counts[0] = 2;
    const auto ch = phase_transmission_probs(taus, counts);
    CHECK(ch.p_tran_rap == Approx(0.36));
    CHECK(ch.p_tran_eap == 0.0);

    PhaseLayout ph;
    ph.eap_slots = 800;
    ph.rap_slots = 6400;
    const auto np = node_conditional_probs(0, taus, counts, 0.0, 0.0, ph);
    CHECK(np.p_acce == Approx(0.8888888888888889).epsilon(1e-15));
    CHECK(np.p_succ == Approx(np.p_acce));
    CHECK(np.p_coll == Approx(1.0 - np.p_acce));
    CHECK(np.p_idle == Approx(0.8));

    taus[0] = 1.0;
    CHECK_THROWS_AS(node_conditional_probs(0, taus, counts, 0.0, 0.0, ph), Error);
}

TEST_CASE("attempt probability from the chain") {
    const auto& t = default_priority_table();
    const auto up7 = tau_from_state(t[7], 0.0, 1.0, 1.0);
    CHECK(up7.b000 == Approx(0.5));
    CHECK(up7.tau == Approx(0.5));
    CHECK(tau_from_state(t[0], 0.0, 1.0, 1.0).tau == Approx(2.0 / 19.0).epsilon(1e-15));
    CHECK(tau_from_state(t[0], 0.3, 0.9, 0.0).tau == 0.0);
    try {
        tau_from_state(t[0], 0.3, 0.0, 1.0);
        FAIL("expected BlockedChannel");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BlockedChannel);
    }
    // sweep p_fail over [0,1]: tau stays a probability
    for (double p = 0.0; p <= 1.0; p += 0.05) {
        const auto b = tau_from_state(t[3], p, 0.9, 0.5);
        CHECK(b.tau >= 0.0);
        CHECK(b.tau <= 1.0);
    }
}

namespace {

void check_identities(const SolutionState& st) {
    for (int i = 0; i < kNumPriorities; ++i) {
        if (!st.active(i)) {
            CHECK(st.tau[i] == 0.0);
            continue;
        }
        CHECK(st.p_succ[i] + st.p_error[i] == Approx(st.p_acce[i]).epsilon(1e-9));
        CHECK(st.p_acce[i] + st.p_coll[i] == Approx(1.0).epsilon(1e-9));
        CHECK(st.p_fail[i] == Approx(st.p_coll[i] + st.p_error[i]).epsilon(1e-9));
        for (double p : {st.tau[i], st.rho[i], st.p_idle[i], st.p_fail[i], st.p_acce[i]}) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
        const auto table = stationary_distribution(Scenario{}.up_table[i], st);
        CHECK(table.total() == Approx(1.0).epsilon(1e-9));
    }
}

}  // namespace

TEST_CASE("default scenario solve") {
    const Scenario s;
    const auto st = solve_fixed_point(s);
    REQUIRE(st.converged);
    CHECK(st.residual < 1e-10);
    CHECK(fixed_point_residual(s, st) < 1e-9);
    CHECK(st.iterations < 5000);
    check_identities(st);

    // reliability R_i = 1 - p_fail^(m+x+1), frozen from an independent implementation
    const double expected[] = {0.0893, 0.1360, 0.1720, 0.2542, 0.3194, 0.4462, 0.5522, 0.9468};
    for (int i = 0; i < kNumPriorities; ++i)
        CHECK(1.0 - std::pow(st.p_fail[i], 8) == Approx(expected[i]).epsilon(6e-4));

    // higher priority, more aggressive access
    for (int i = 1; i < kNumPriorities; ++i) CHECK(st.tau[i] > st.tau[i - 1]);
}

TEST_CASE("solution does not depend on the starting point") {
    const Scenario s;
    SolverOptions a, b;
    a.initial_tau = 0.01;
    b.initial_tau = 0.3;
    const auto x = solve_fixed_point(s, a);
    const auto y = solve_fixed_point(s, b);
    CHECK(((x.tau - y.tau).abs() < 1e-6).all());
    CHECK(((x.p_fail - y.p_fail).abs() < 1e-6).all());
}

TEST_CASE("inactive priorities drop out") {
    Scenario s;
    s.node_counts = NodeCounts::Zero();
    s.node_counts[7] = 3;
    s.node_counts[2] = 4;
    const auto st = solve_fixed_point(s);
    check_identities(st);
    CHECK(st.tau[0] == 0.0);
    CHECK(st.tau[7] > 0.0);
}

TEST_CASE("no EAP means UP7 competes in the RAP only") {
    Scenario s;
    s.eap1_len = 0.0;
    const auto st = solve_fixed_point(s);
    CHECK(st.phases.eap_slots == 0);
    CHECK(st.phases.eap_weight == 0.0);
    CHECK(st.p_acce[7] == doctest::Approx(st.p_acce_rap[7]));
    check_identities(st);
}

TEST_CASE("iteration budget exhaustion raises ConvergenceError") {
    SolverOptions o;
    o.max_iterations = 5;
    try {
        solve_fixed_point(Scenario{}, o);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.kind() == ErrorKind::Convergence);
        CHECK(e.iterations() == 5);
        CHECK(e.last_residual() > 1e-10);
    }
}

TEST_CASE("stationary distribution refuses an unconverged state") {
    SolutionState st;
    st.node_counts.setConstant(1);
    try {
        stationary_distribution(default_priority_table()[0], st);
        FAIL("expected StaleState");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::StaleState);
    }
}

TEST_CASE("random feasible scenarios converge and keep the identities") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> nodes(0, 4), payload(0, 255);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 40; ++k) {
        Scenario s;
        for (int i = 0; i < kNumPriorities; ++i) s.node_counts[i] = nodes(rng);
        if (s.total_nodes() == 0) s.node_counts[0] = 1;
        s.ber = std::pow(10.0, -6.0 + 4.0 * u(rng));
        s.payload_bytes = payload(rng);
        s.traffic = u(rng) < 0.5 ? Traffic::Saturated : Traffic::NonSaturated;
        s.mechanism = u(rng) < 0.5 ? Mechanism::Basic : Mechanism::RtsCts;
        s.arrival_rates.setConstant(0.1 + 5.0 * u(rng));
        CAPTURE(k);
        const auto st = solve_fixed_point(s);
        check_identities(st);
    }
}
