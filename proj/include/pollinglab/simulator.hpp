#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pollinglab/model.hpp"

namespace pollinglab::sim {

struct SimConfig {
    double horizon = 1e6;  // simulated time per replication
    double warmup = 0.0;   // statistics start after this time
    std::uint64_t seed = 1;
    int replications = 1;
    std::vector<double> tail_levels;   // x-levels for P(V > x)
    std::vector<double> cdf_grid;      // x-levels for P(V <= x)
    std::vector<double> lst_s_values;  // s-grid for the switch-epoch empirical LST
    std::size_t max_switch_samples = 100000;  // retained raw samples per run

    void validate() const;
};

struct ScalarEstimate {
    double value = 0.0;
    double std_error = 0.0;  // across replications; 0 when replications < 2
};

struct LevelEstimate {
    double level = 0.0;
    ScalarEstimate probability;
};

struct QueueEstimate {
    ScalarEstimate time_avg_workload;
    ScalarEstimate workload_second_moment;
    ScalarEstimate zero_fraction;  // fraction of time with V = 0
    ScalarEstimate occupancy;      // fraction of time the server resides here
    std::vector<LevelEstimate> tail_exceedance;  // P(V > x)
    std::vector<LevelEstimate> cdf;              // P(V <= x)
};

struct SwitchEpochEstimate {
    std::vector<LevelEstimate> lst;  // mean exp(-s V1) at the requested s-grid
    std::uint64_t count = 0;         // post-warmup visit ends at queue 2
    std::vector<double> samples;     // capped at max_switch_samples
};

struct SimEstimate {
    QueueEstimate queue1, queue2;
    SwitchEpochEstimate switch_epoch;  // V1 at the ends of queue-2 visits
    bool stable = true;                // from check_stability; unstable runs are allowed
    double horizon = 0.0, warmup = 0.0;
    std::uint64_t seed = 0;
    int replications = 1;
    double max_conservation_defect = 0.0;  // relative, max over replications

    // per-replication time-average workloads (back the std errors; also used
    // by tests that need replication-level pairing)
    std::array<std::vector<double>, 2> rep_time_avg_workload;
};

/// Workload-path simulation of the polling model: piecewise-linear workloads
/// with unit drain at the attended queue, exponential timers, preemptive
/// resume, no switch-over. Integrals are accumulated exactly between events.
/// Replications run on independent derived streams; identical seeds give
/// bit-identical estimates.
SimEstimate simulate(const PollingModel& model, const SimConfig& config);

struct LstEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Empirical LST of a sample set: mean of exp(-s x) with its standard error.
LstEstimate estimate_lst(const std::vector<double>& samples, double s);

struct QueueLengthCell {
    int n1 = 0, n2 = 0, k = 1;
    double frequency = 0.0;  // long-run fraction of time, mean over replications
    double std_error = 0.0;
};

struct QueueLengthFrequencies {
    std::vector<QueueLengthCell> cells;            // frequencies sum to 1
    std::array<ScalarEstimate, 2> server_marginal; // fraction with server at k=1,2
    double epsilon = 1.0;
    int replications = 1;

    // marginal over the server position: mean fraction of time in (n1, n2)
    double joint_queue_frequency(int n1, int n2) const;
};

/// CTMC simulation of the joint queue-length process with exponential
/// services; arrival and service rates are scaled by epsilon, timers are not.
QueueLengthFrequencies simulate_queue_lengths(const PollingModel& model, double epsilon,
                                              const SimConfig& config);

} // namespace pollinglab::sim
