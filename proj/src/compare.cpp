#include "wban/compare.hpp"

#include "wban/error.hpp"

#include <cmath>

namespace wban {

const char* to_string(Metric m) {
    switch (m) {
        case Metric::Reliability: return "reliability";
        case Metric::Throughput: return "throughput";
        case Metric::Energy: return "energy";
        case Metric::Delay: return "delay";
    }
    return "?";
}

const MetricTolerance& Tolerances::of(Metric m) const {
    switch (m) {
        case Metric::Reliability: return reliability;
        case Metric::Throughput: return throughput;
        case Metric::Energy: return energy;
        case Metric::Delay: return delay;
    }
    return reliability;
}

double relative_deviation(double analytical, double simulated) {
    const double diff = std::abs(simulated - analytical);
    if (analytical == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / std::abs(analytical);
}

int DeviationReport::failures() const {
    int n = 0;
    for (const auto& e : entries) n += e.pass ? 0 : 1;
    return n;
}

namespace {

const PerUp& field(const MetricsReport& r, Metric m) {
    switch (m) {
        case Metric::Reliability: return r.reliability;
        case Metric::Throughput: return r.throughput;
        case Metric::Energy: return r.energy;
        case Metric::Delay: return r.delay;
    }
    return r.reliability;
}

}  // namespace

DeviationReport compare(const MetricsSet& analytical, const MetricsSet& simulated,
                        const Tolerances& tol) {
    if (analytical.size() != simulated.size())
        throw Error(ErrorKind::Report, "analytical and simulated sets differ in size");
    DeviationReport report;
    for (const auto& [key, a] : analytical) {
        const auto it = simulated.find(key);
        if (it == simulated.end())
            throw Error(ErrorKind::Report, "no simulated result for scenario '" + key + "'");
        const MetricsReport& s = it->second;
        for (int up = 0; up < kNumPriorities; ++up) {
            if (a.available[up] != s.available[up] && a.available[up])
                throw Error(ErrorKind::Report, "scenario '" + key + "' UP" +
                                                   std::to_string(up) +
                                                   " has no simulated estimate");
            if (!a.available[up]) continue;
            for (Metric m : {Metric::Reliability, Metric::Throughput, Metric::Energy,
                             Metric::Delay}) {
                Deviation d;
                d.key = key;
                d.up = up;
                d.metric = m;
                d.analytical = field(a, m)[up];
                d.simulated = field(s, m)[up];
                d.relative = relative_deviation(d.analytical, d.simulated);
                d.absolute = std::abs(d.simulated - d.analytical);
                const MetricTolerance& t = tol.of(m);
                d.gated = std::isfinite(t.relative) || t.absolute > 0.0;
                d.pass = !d.gated || d.relative <= t.relative || d.absolute <= t.absolute;
                report.pass = report.pass && d.pass;
                report.entries.push_back(d);
            }
        }
    }
    return report;
}

}  // namespace wban
