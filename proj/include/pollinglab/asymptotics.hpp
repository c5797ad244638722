#pragma once

#include <string>

#include "pollinglab/model.hpp"

namespace pollinglab {

/// Coefficients of the small-s expansion driving the heavy-traffic limit of
/// queue 1: the Y-transform denominator reads a0 + s a1 - s^2/2 a2 + o(s^2).
struct HeavyTrafficCoefficients {
    double a0;  // c2/(c1+c2) - rho1 (the stability gap; may be <= 0)
    double a1;  // time units; the heavy-traffic limit mean as rho1 -> bound
    double a2;  // time^2 units
};

struct TailAsymptote {
    double prefactor;  // C in P(. > x) ~ C x^{1-nu}
    double exponent;   // 1 - nu
    std::string note;
};

enum class TailComponent { v1, mg1, y };

HeavyTrafficCoefficients ht_coefficients(const PollingModel& model);

/// Mean of the exponential heavy-traffic limit of (bound - rho1) V1.
double ht_limit_mean(const PollingModel& model);

/// E exp(-s a0 V1): the marginal workload LST evaluated at s a0, which
/// converges to 1/(1 + s a1) as rho1 approaches the stability bound.
Complex ht_scaled_lst(const PollingModel& model, Complex s);

/// Regularly-varying tail prefactors for Pareto service at queue 1 with
/// nu in (1,2); the slowly varying constant scale^nu is folded in.
/// The components satisfy C_v1 = C_mg1 + C_y exactly.
TailAsymptote heavy_tail_asymptote(const PollingModel& model, TailComponent which);

/// Subexponential tail approximation rho1/(bound - rho1) P(B^r > x).
double subexp_tail_approx(const PollingModel& model, double x);

/// Independent oracle for the tail: quadrature of
/// lambda1 int_0^inf P(B > x + y gap) dy with gap = bound - rho1.
double one_big_jump_integral(const PollingModel& model, double x);

/// Coefficient of contraction: the root of x^{nu-1} L(1/x) = gap/rho1 for
/// the constant slowly varying factor L = scale^nu.
double contraction_delta(const PollingModel& model, double nu);

/// LST of the Mittag-Leffler heavy-traffic limit in the regularly varying
/// case: 1 / (1 + (E B)^{nu-1} s^{nu-1}).
double mittag_leffler_limit_lst(double mean_b, double nu, double s);

struct WorkConservationGap {
    double polling_total;     // E V1 + E V2 under the timer discipline
    double conserving_total;  // M/G/1 mean workload at the total load
};

/// Mean-workload comparison against a work-conserving discipline; requires a
/// fully symmetric model. polling_total > conserving_total always.
WorkConservationGap work_conservation_gap(const PollingModel& symmetric_model);

} // namespace pollinglab
