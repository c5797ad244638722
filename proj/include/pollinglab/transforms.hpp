#pragma once

#include "pollinglab/model.hpp"

namespace pollinglab {

struct WorkloadMoments {
    double mean;      // time units
    double variance;  // time^2 units
};

/// Busy-period LST of the M/G/1 queue in isolation: the smallest-modulus
/// root z of z = lst(s + (1-z) lambda), found by fixed-point iteration from
/// z0 = 0 (monotone on the real axis). Throws Errc::non_convergence when the
/// iteration budget is exhausted, which signals near-critical parameters.
Complex busy_period_lst(double lambda, const ServiceDistribution& service, Complex s,
                        long max_iterations = 100000);

/// Pollaczek-Khinchine workload LST of the isolated M/G/1 queue,
/// (1-rho) s / (s - lambda (1 - lst(s))), with value 1 at s = 0.
Complex mg1_workload_lst(double lambda, const ServiceDistribution& service, Complex s);

/// Steady-state workload LST of the chosen queue at an arbitrary epoch.
Complex marginal_workload_lst(const PollingModel& model, int queue_index, Complex s);

/// LST of V1 sampled at the ends of the server's visits to queue 2
/// (equivalently, at an arbitrary epoch of such a visit).
Complex switch_epoch_lst(const PollingModel& model, Complex s);

/// LST of V1 sampled at the ends of the server's visits to queue 1.
Complex visit_end_lst(const PollingModel& model, Complex s);

/// LST of Y, the non-M/G/1 term of the workload decomposition
/// V1 = V_{M/G/1} + Y (independent).
Complex y_lst(const PollingModel& model, Complex s);

double workload_mean(const PollingModel& model, int queue_index);
double workload_variance(const PollingModel& model, int queue_index);
WorkloadMoments workload_moments(const PollingModel& model, int queue_index);

/// P(V <= x) by numerical inversion of marginal_workload_lst(s)/s.
/// Throws Errc::inversion_accuracy when the internal error estimate
/// exceeds 1e-7.
double invert_workload_cdf(const PollingModel& model, int queue_index, double x);

/// The zero-workload atom P(V = 0), evaluated as the large-s limit of the
/// marginal workload LST.
double workload_atom(const PollingModel& model, int queue_index);

} // namespace pollinglab
