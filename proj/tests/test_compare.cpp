#include <doctest.h>

#include "wban/compare.hpp"
#include "wban/error.hpp"

#include <cmath>

using namespace wban;

namespace {

MetricsReport report(double r, double s, double e, double d) {
    MetricsReport m;
    m.available.setConstant(false);
    m.available[0] = true;
    m.reliability[0] = r;
    m.throughput[0] = s;
    m.energy[0] = e;
    m.delay[0] = d;
    return m;
}

}  // namespace

TEST_CASE("relative deviation") {
    CHECK(relative_deviation(2.0, 2.2) == doctest::Approx(0.1));
    CHECK(relative_deviation(0.0, 0.0) == 0.0);
    CHECK(std::isinf(relative_deviation(0.0, 1e-9)));
    CHECK(relative_deviation(-2.0, -1.0) == doctest::Approx(0.5));
}

TEST_CASE("tolerance bands") {
    const MetricsSet a = {{"p", report(0.20, 0.010, 1.0, 1.0)}};
    // reliability 0.24 is 20% off but within 0.05 absolute; delay 20% off passes
    CHECK(compare(a, {{"p", report(0.24, 0.011, 5.0, 1.2)}}).pass);
    // delay 30% off fails, energy never gates
    const auto bad = compare(a, {{"p", report(0.20, 0.010, 9.0, 1.3)}});
    CHECK_FALSE(bad.pass);
    CHECK(bad.failures() == 1);
    CHECK(bad.entries.size() == 4);
    for (const auto& e : bad.entries) {
        if (e.metric == Metric::Energy) CHECK_FALSE(e.gated);
        if (e.metric == Metric::Delay) CHECK_FALSE(e.pass);
    }
    // reliability 0.5 vs 0.2: both bands exceeded
    CHECK_FALSE(compare(a, {{"p", report(0.5, 0.010, 1.0, 1.0)}}).pass);
}

TEST_CASE("mismatched sets") {
    const MetricsSet a = {{"p", report(0.2, 0.01, 1.0, 1.0)}};
    auto kind = [&](const MetricsSet& s) {
        try {
            compare(a, s);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Parse;
    };
    CHECK(kind({}) == ErrorKind::Report);
    CHECK(kind({{"q", report(0.2, 0.01, 1.0, 1.0)}}) == ErrorKind::Report);
    MetricsReport missing = report(0.2, 0.01, 1.0, 1.0);
    missing.available[0] = false;
    CHECK(kind({{"p", missing}}) == ErrorKind::Report);
}
