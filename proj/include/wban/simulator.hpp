#ifndef WBAN_SIMULATOR_HPP
#define WBAN_SIMULATOR_HPP

#include "wban/core_model.hpp"
#include "wban/metrics.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace wban {

/// Backoff state of one sensor node. `has_frame == false` is the empty state.
struct NodeState {
    int up_index = 0;
    int stage = 0;
    int counter = 0;
    int window = 1;
    bool counter_locked = false;
    bool has_frame = false;
    bool counted = false;  // frame born after warm-up, so it enters the statistics
    double frame_birth_time = 0.0;
    double next_arrival = 0.0;
    int retry_count = 0;
    std::uint64_t rng_stream = 0;
};

/// Protocol-rule violations found while simulating. All zero for a correct run.
struct AuditCounters {
    std::uint64_t forbidden_phase_tx = 0;
    std::uint64_t boundary_overruns = 0;
    std::uint64_t invalid_decrements = 0;  // decrement of a counter already at zero
    std::uint64_t window_rule_violations = 0;
    std::uint64_t counter_range_violations = 0;

    std::uint64_t total() const {
        return forbidden_phase_tx + boundary_overruns + invalid_decrements +
               window_rule_violations + counter_range_violations;
    }
    bool operator==(const AuditCounters&) const = default;
};

struct SimStats {
    using Counters = std::array<std::uint64_t, kNumPriorities>;
    using Sums = std::array<double, kNumPriorities>;

    Counters frames_generated{};
    Counters attempts{};
    Counters successes{};
    Counters collisions{};
    Counters error_transmissions{};
    Counters drops{};
    Counters suppressed_arrivals{};

    Sums total_access_delay{};      // s, generation to delivery or drop
    Sums energy_tx{};               // J, summed over the UP's nodes
    Sums energy_rx{};
    Sums energy_idle{};
    Sums payload_bits_delivered{};

    std::array<int, kNumPriorities> node_counts{};

    double simulated_time = 0.0;  // accumulation window, s
    double idle_time = 0.0;
    double busy_time = 0.0;
    std::uint64_t idle_slots = 0;
    std::uint64_t exchanges = 0;
    std::uint64_t superframes_elapsed = 0;
    std::uint64_t events = 0;  // whole run, warm-up included
    AuditCounters audit;

    bool operator==(const SimStats&) const = default;
};

struct SimOptions {
    std::uint64_t seed = 1;
    double horizon = 60.0;  // s
    int warmup_superframes = 2;
    std::ostream* trace = nullptr;
};

/// Slot-level simulation of the beacon-mode EAP1/RAP1 superframe with the
/// prioritised CSMA/CA backoff. Deterministic in (scenario, seed, horizon).
SimStats run_simulation(const Scenario& scenario, const SimOptions& options);

/// Slots a node needs to hold the channel for an exchange of `t` seconds,
/// including the SIFS of idle channel that precedes the next backoff slot.
int exchange_slots(double t, const PhyMacConfig& phy);

MetricsReport sim_metrics(const SimStats& stats, const Scenario& scenario);

/// Independent seed for replication `index` of a run seeded with `seed`.
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t index);

std::vector<SimStats> run_replications(const Scenario& scenario, std::uint64_t seed,
                                       double horizon, int replications, int parallel = 1);

/// Mean over replications with 95% Student-t half-widths.
struct ReplicationSummary {
    MetricsReport mean;
    MetricsReport half_width;
    int replications = 0;
};

ReplicationSummary summarize(const std::vector<MetricsReport>& reports);

}  // namespace wban

#endif  // WBAN_SIMULATOR_HPP
