#ifndef WBAN_COMPARE_HPP
#define WBAN_COMPARE_HPP

#include "wban/metrics.hpp"

#include <limits>
#include <map>
#include <string>
#include <vector>

namespace wban {

enum class Metric { Reliability, Throughput, Energy, Delay };

const char* to_string(Metric m);

/// A metric passes when its relative OR its absolute deviation is within bounds.
/// Infinite bounds disable the metric's gate; it is still reported.
struct MetricTolerance {
    double relative = std::numeric_limits<double>::infinity();
    double absolute = 0.0;
};

struct Tolerances {
    MetricTolerance reliability{0.15, 0.05};
    MetricTolerance throughput{0.15, 0.05};
    MetricTolerance energy{};
    MetricTolerance delay{0.25, 0.0};

    const MetricTolerance& of(Metric m) const;
};

/// |simulated - analytical| / |analytical|; 0 when both are zero.
double relative_deviation(double analytical, double simulated);

struct Deviation {
    std::string key;
    int up = 0;
    Metric metric = Metric::Reliability;
    double analytical = 0.0;
    double simulated = 0.0;
    double relative = 0.0;
    double absolute = 0.0;
    bool gated = false;
    bool pass = true;
};

struct DeviationReport {
    std::vector<Deviation> entries;
    bool pass = true;

    int failures() const;
};

using MetricsSet = std::map<std::string, MetricsReport>;

/// Throws Report when the two sets are not keyed identically.
DeviationReport compare(const MetricsSet& analytical, const MetricsSet& simulated,
                        const Tolerances& tolerances = {});

}  // namespace wban

#endif  // WBAN_COMPARE_HPP
