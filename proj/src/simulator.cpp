#include "wban/simulator.hpp"

#include "wban/error.hpp"
#include "wban/parallel.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace wban {

int exchange_slots(double t, const PhyMacConfig& phy) {
    return static_cast<int>(std::ceil((t + phy.sifs) / phy.csma_slot - 1e-9));
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finaliser over (seed, index)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

using Rng = std::mt19937_64;

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

enum class Outcome { Success, Collision, Error };

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Success: return "success";
        case Outcome::Collision: return "collision";
        case Outcome::Error: return "error";
    }
    return "?";
}

class Simulation {
public:
    Simulation(const Scenario& s, const SimOptions& opt) : s_(s), opt_(opt) {
        validate(s_);
        const PhyMacConfig& phy = s_.phy;
        slot_ = phy.csma_slot;
        durations_ = exchange_durations(phy, s_.mechanism, s_.payload_bytes);
        per_ = packet_error_rate(s_.ber, s_.mechanism, phy, s_.payload_bytes);
        succ_slots_ = exchange_slots(durations_.t_succ, phy);
        coll_slots_ = exchange_slots(durations_.t_coll, phy);
        eap_slots_ = phase_slots(s_.eap1_len, slot_);
        rap_slots_ = phase_slots(s_.rap1_len, slot_);
        superframe_slots_ = eap_slots_ + rap_slots_;
        check_feasible();

        horizon_slots_ = static_cast<long>(std::ceil(opt_.horizon / slot_ - 1e-9));
        warmup_slots_ = static_cast<long>(opt_.warmup_superframes) * superframe_slots_;
        warmup_time_ = warmup_slots_ * slot_;

        std::uint64_t stream = 0;
        for (int i = 0; i < kNumPriorities; ++i) {
            stats_.node_counts[i] = s_.node_counts[i];
            for (int k = 0; k < s_.node_counts[i]; ++k) {
                NodeState n;
                n.up_index = i;
                n.rng_stream = stream;
                nodes_.push_back(n);
                rngs_.push_back(make_stream(opt_.seed, stream));
                ++stream;
            }
        }
        channel_rng_ = make_stream(opt_.seed, 0xC0FFEEULL << 32);
        for (std::size_t id = 0; id < nodes_.size(); ++id) {
            NodeState& n = nodes_[id];
            if (s_.traffic == Traffic::Saturated) {
                new_frame(id, 0.0);
            } else {
                n.next_arrival = draw_interarrival(id, 0.0);
            }
        }
    }

    SimStats run() {
        long s = 0;
        long window_start = -1;
        while (s < horizon_slots_) {
            if (window_start < 0 && s >= warmup_slots_) window_start = s;
            const bool in_window = window_start >= 0;
            const long pos = s % superframe_slots_;
            const bool in_eap = pos < eap_slots_;
            const long phase_end = (s - pos) + (in_eap ? eap_slots_ : superframe_slots_);
            const double now = s * slot_;

            if (s_.traffic == Traffic::NonSaturated) admit_arrivals(now);

            transmitters_.clear();
            for (std::size_t id = 0; id < nodes_.size(); ++id)
                if (nodes_[id].has_frame && nodes_[id].counter == 0) transmitters_.push_back(id);

            if (!transmitters_.empty()) {
                s = exchange(s, now, in_eap, phase_end, in_window);
            } else {
                idle_slot(s, in_eap, phase_end, in_window);
                ++s;
            }
        }
        if (window_start < 0) window_start = s;
        stats_.simulated_time = (s - window_start) * slot_;
        stats_.superframes_elapsed = static_cast<std::uint64_t>(s / superframe_slots_);
        return stats_;
    }

private:
    bool permitted(int up, bool in_eap) const { return !in_eap || up == kHighestPriority; }

    void check_feasible() const {
        if (superframe_slots_ <= 0 || rap_slots_ <= 0)
            throw Error(ErrorKind::Configuration, "RAP1 shorter than one CSMA slot");
        for (int i = 0; i < kNumPriorities; ++i) {
            if (s_.node_counts[i] <= 0) continue;
            const long longest = i == kHighestPriority ? std::max(eap_slots_, rap_slots_)
                                                       : rap_slots_;
            if (longest < succ_slots_ + 1) {
                std::ostringstream os;
                os << "UP" << i << ": exchange of " << succ_slots_
                   << " slots does not fit in any permitted phase";
                throw Error(ErrorKind::Configuration, os.str());
            }
        }
        if (opt_.horizon < 10.0 * superframe_slots_ * slot_)
            throw Error(ErrorKind::Configuration, "horizon must cover at least 10 superframes");
    }

    double draw_interarrival(std::size_t id, double from) {
        const double lambda = s_.arrival_rates[nodes_[id].up_index];
        if (lambda <= 0.0) return std::numeric_limits<double>::infinity();
        std::exponential_distribution<double> exp(lambda);
        return from + exp(rngs_[id]);
    }

    int draw_counter(std::size_t id, int window) {
        std::uniform_int_distribution<int> u(1, window);
        return u(rngs_[id]);
    }

    void new_frame(std::size_t id, double birth) {
        NodeState& n = nodes_[id];
        const auto& up = s_.up_table[n.up_index];
        n.has_frame = true;
        n.frame_birth_time = birth;
        n.counted = birth >= warmup_time_;
        n.stage = 0;
        n.retry_count = 0;
        n.window = up.cw_min;
        n.counter = draw_counter(id, n.window);
        n.counter_locked = false;
        ++stats_.events;
        if (n.counted) ++stats_.frames_generated[n.up_index];
        trace(birth, id, "frame", n);
    }

    void admit_arrivals(double now) {
        for (std::size_t id = 0; id < nodes_.size(); ++id) {
            NodeState& n = nodes_[id];
            if (n.has_frame || n.next_arrival > now) continue;
            const double birth = n.next_arrival;
            new_frame(id, birth);
            n.next_arrival = draw_interarrival(id, birth);
        }
    }

    // Frame resolved at time t: start over with a fresh frame or go empty.
    void release(std::size_t id, double t) {
        NodeState& n = nodes_[id];
        if (s_.traffic == Traffic::Saturated) {
            new_frame(id, t);
            return;
        }
        n.has_frame = false;
        n.counter = 0;
        n.stage = 0;
        n.retry_count = 0;
        // the single-frame buffer discards what arrived while the frame was outstanding
        while (n.next_arrival < t) {
            if (n.next_arrival >= warmup_time_) ++stats_.suppressed_arrivals[n.up_index];
            n.next_arrival = draw_interarrival(id, n.next_arrival);
        }
    }

    void idle_slot(long s, bool in_eap, long phase_end, bool in_window) {
        ++stats_.events;
        for (auto& n : nodes_) {
            if (!n.has_frame) continue;
            n.counter_locked = !permitted(n.up_index, in_eap) || s + 1 + succ_slots_ > phase_end;
            if (n.counter_locked) continue;
            if (n.counter <= 0) ++stats_.audit.invalid_decrements;
            --n.counter;
            if (n.counter < 0 || n.counter > n.window) ++stats_.audit.counter_range_violations;
        }
        if (!in_window) return;
        ++stats_.idle_slots;
        stats_.idle_time += slot_;
        for (int i = 0; i < kNumPriorities; ++i)
            stats_.energy_idle[i] += s_.node_counts[i] * s_.phy.p_idle * slot_;
    }

    long exchange(long s, double now, bool in_eap, long phase_end, bool in_window) {
        const PhyMacConfig& phy = s_.phy;
        Outcome outcome = Outcome::Collision;
        if (transmitters_.size() == 1) {
            std::bernoulli_distribution corrupted(per_);
            outcome = corrupted(channel_rng_) ? Outcome::Error : Outcome::Success;
        }
        const int slots = outcome == Outcome::Collision ? coll_slots_ : succ_slots_;
        const double t_x = outcome == Outcome::Collision ? durations_.t_coll : durations_.t_succ;
        const double busy = slots * slot_;
        const double resolved_at = now + t_x;

        if (in_window) {
            ++stats_.exchanges;
            stats_.busy_time += busy;
            // every node overhears at idle power; transmitters' own parts adjusted below
            for (int i = 0; i < kNumPriorities; ++i)
                stats_.energy_idle[i] += s_.node_counts[i] * phy.p_idle * busy;
        }

        for (std::size_t id : transmitters_) {
            NodeState& n = nodes_[id];
            const int up = n.up_index;
            ++stats_.events;
            if (!permitted(up, in_eap)) ++stats_.audit.forbidden_phase_tx;
            if (s + succ_slots_ > phase_end) ++stats_.audit.boundary_overruns;
            trace(now, id, outcome_name(outcome), n);

            if (in_window) account_tx_energy(up, outcome);
            if (n.counted) {
                ++stats_.attempts[up];
                if (outcome == Outcome::Collision) ++stats_.collisions[up];
                if (outcome == Outcome::Error) ++stats_.error_transmissions[up];
            }

            if (outcome == Outcome::Success) {
                if (n.counted) {
                    ++stats_.successes[up];
                    stats_.payload_bits_delivered[up] += 8.0 * s_.payload_bytes;
                    stats_.total_access_delay[up] += resolved_at - n.frame_birth_time;
                }
                release(id, resolved_at);
                continue;
            }

            const auto& params = s_.up_table[up];
            ++n.stage;
            n.retry_count = n.stage;
            if (n.stage > params.last_stage()) {
                if (n.counted) {
                    ++stats_.drops[up];
                    stats_.total_access_delay[up] += resolved_at - n.frame_birth_time;
                }
                trace(resolved_at, id, "drop", n);
                release(id, resolved_at);
                continue;
            }
            // odd stage keeps the window, even stage doubles it; past stage m it is CW_max
            if (n.stage > params.m) n.window = params.cw_max;
            else if (n.stage % 2 == 0) n.window = std::min(2 * n.window, params.cw_max);
            if (n.window != cw_schedule(params, n.stage)) ++stats_.audit.window_rule_violations;
            n.counter = draw_counter(id, n.window);
        }
        return s + slots;
    }

    void account_tx_energy(int up, Outcome outcome) {
        const PhyMacConfig& phy = s_.phy;
        const double data = durations_.t_data;
        const double ctrl = durations_.t_ctrl;
        double tx = 0.0, rx = 0.0;
        if (s_.mechanism == Mechanism::Basic) {
            tx = data;
            rx = ctrl;
        } else if (outcome == Outcome::Collision) {
            tx = ctrl;
            rx = ctrl;
        } else {
            tx = ctrl + data;
            rx = 2 * ctrl;
        }
        stats_.energy_tx[up] += tx * phy.p_tx;
        stats_.energy_rx[up] += rx * phy.p_rx;
        stats_.energy_idle[up] -= (tx + rx) * phy.p_idle;
    }

    void trace(double t, std::size_t id, const char* what, const NodeState& n) {
        if (opt_.trace == nullptr) return;
        *opt_.trace << std::fixed << std::setprecision(6) << t << ' ' << id << ' ' << n.up_index
                    << ' ' << what << ' ' << n.stage << ' ' << n.counter << '\n';
    }

    const Scenario& s_;
    const SimOptions& opt_;
    double slot_ = 0.0;
    ExchangeDurations durations_;
    double per_ = 0.0;
    int succ_slots_ = 0;
    int coll_slots_ = 0;
    long eap_slots_ = 0;
    long rap_slots_ = 0;
    long superframe_slots_ = 0;
    long horizon_slots_ = 0;
    long warmup_slots_ = 0;
    double warmup_time_ = 0.0;

    std::vector<NodeState> nodes_;
    std::vector<Rng> rngs_;
    Rng channel_rng_;
    std::vector<std::size_t> transmitters_;
    SimStats stats_;
};

}  // namespace

SimStats run_simulation(const Scenario& scenario, const SimOptions& options) {
    Simulation sim(scenario, options);
    return sim.run();
}

MetricsReport sim_metrics(const SimStats& st, const Scenario& s) {
    MetricsReport r;
    const double states = static_cast<double>(st.idle_slots + st.exchanges);
    for (int i = 0; i < kNumPriorities; ++i) {
        const int n = st.node_counts[i];
        const std::uint64_t resolved = st.successes[i] + st.drops[i];
        if (n <= 0 || resolved == 0) continue;
        r.available[i] = true;
        r.reliability[i] = static_cast<double>(st.successes[i]) / resolved;
        r.throughput[i] =
            st.simulated_time > 0
                ? st.payload_bits_delivered[i] / s.phy.psdu_rate / st.simulated_time
                : 0.0;
        const double energy = st.energy_tx[i] + st.energy_rx[i] + st.energy_idle[i];
        r.energy[i] = states > 0 ? energy / (n * states) : 0.0;
        r.energy_per_second[i] = st.simulated_time > 0 ? energy / (n * st.simulated_time) : 0.0;
        r.delay[i] = st.total_access_delay[i] / resolved;
    }
    return r;
}

std::vector<SimStats> run_replications(const Scenario& scenario, std::uint64_t seed,
                                       double horizon, int replications, int parallel) {
    if (replications < 1) throw Error(ErrorKind::Validation, "replications must be >= 1");
    std::vector<SimStats> out(static_cast<std::size_t>(replications));
    parallel_for(out.size(), parallel, [&](std::size_t r) {
        SimOptions opt;
        opt.seed = replication_seed(seed, r);
        opt.horizon = horizon;
        out[r] = run_simulation(scenario, opt);
    });
    return out;
}

ReplicationSummary summarize(const std::vector<MetricsReport>& reports) {
    ReplicationSummary sum;
    sum.replications = static_cast<int>(reports.size());
    if (reports.empty()) return sum;

    auto reduce = [&](PerUp MetricsReport::*field) {
        PerUp mean = PerUp::Constant(NAN), hw = PerUp::Constant(NAN);
        for (int i = 0; i < kNumPriorities; ++i) {
            std::vector<double> xs;
            for (const auto& r : reports)
                if (r.available[i]) xs.push_back((r.*field)[i]);
            if (xs.empty()) continue;
            const auto k = static_cast<double>(xs.size());
            double m = 0.0;
            for (double v : xs) m += v;
            m /= k;
            mean[i] = m;
            if (xs.size() < 2) {
                hw[i] = 0.0;
                continue;
            }
            double ss = 0.0;
            for (double v : xs) ss += (v - m) * (v - m);
            const double sd = std::sqrt(ss / (k - 1));
            boost::math::students_t dist(k - 1);
            hw[i] = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(k);
        }
        (sum.mean.*field) = mean;
        (sum.half_width.*field) = hw;
    };
    reduce(&MetricsReport::reliability);
    reduce(&MetricsReport::throughput);
    reduce(&MetricsReport::energy);
    reduce(&MetricsReport::energy_per_second);
    reduce(&MetricsReport::delay);
    for (int i = 0; i < kNumPriorities; ++i) {
        bool any = false;
        for (const auto& r : reports) any = any || r.available[i];
        sum.mean.available[i] = any;
        sum.half_width.available[i] = any;
    }
    return sum;
}

}  // namespace wban
