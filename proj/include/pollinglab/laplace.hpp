#pragma once

#include <complex>
#include <functional>

namespace pollinglab {

struct LaplaceInversionResult {
    double value;
    double error_estimate;  // Euler-extrapolation increment + aliasing bound
};

/// Abate-Whitt Euler-summation inversion of a Laplace transform F at t > 0:
/// f(t) ~ (e^{A/2}/t) [ Re F(A/2t)/2 + sum_k (-1)^k Re F((A+2k pi i)/2t) ],
/// the alternating series accelerated by binomial (Euler) averaging.
/// Control constants are fixed for bit-reproducible output:
///   A = 18.4 (aliasing error ~ e^{-A} for |f| <= 1),
///   38 base terms, 11 Euler averaging terms.
LaplaceInversionResult invert_laplace(
    const std::function<std::complex<double>(std::complex<double>)>& transform, double t);

} // namespace pollinglab
