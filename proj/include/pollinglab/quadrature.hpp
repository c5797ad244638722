#pragma once

#include <functional>

namespace pollinglab {

/// Adaptive Gauss-Kronrod 15(7) integration of f on [a, b] to an absolute
/// tolerance. Throws Errc::quadrature_failure when the subdivision budget is
/// exhausted before the tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, int max_intervals = 4000);

/// int_x^inf f(z) dz through the substitution z = x + scale (w^{-power} - 1),
/// which maps (0,1] onto [x, inf); scale sets the length scale of the
/// integrand (typically a mean) and power is matched to polynomial tails
/// (power ~ 1.5/(nu-1) flattens an x^{-nu} tail).
double integrate_tail(const std::function<double(double)>& f, double x, double scale,
                      double power = 2.0, double abs_tol = 1e-10);

} // namespace pollinglab
