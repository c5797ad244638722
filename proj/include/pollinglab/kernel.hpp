#pragma once

#include <vector>

#include "pollinglab/model.hpp"

namespace pollinglab {

/// Fully symmetric two-queue model used by the joint-workload functional
/// equation. Stability (lambda E B < 1/2) and a light-tailed service law are
/// enforced at construction.
struct SymmetricModel {
    double lambda;
    ServiceDistribution service;
    double c;

    SymmetricModel(double lambda, ServiceDistribution service, double c);
    PollingModel as_polling_model() const;
};

/// Kernel of the symmetric joint-workload equation:
/// K(s1,s2) = c^2 - (c - s1 + g(s1) + g(s2)) (c - s2 + g(s1) + g(s2))
/// with g(s) = lambda (1 - lst(s)). Symmetric in its arguments.
Complex kernel_eval(const SymmetricModel& sym, Complex s1, Complex s2);

struct ContourPoint {
    double theta;
    Complex z;
    double kernel_residual;  // |K(z, conj z)|
};

/// The unique z with Re z >= 0 solving
/// c - z + 2 lambda Re(1 - lst(z)) = c e^{i theta}.
/// Tracked by damped-Newton continuation in theta; the imaginary part of the
/// equation is linear and gives Im z = -c sin(theta) directly, so the Newton
/// iteration runs on Re z with a bisection safeguard.
Complex contour_point(const SymmetricModel& sym, double theta);

/// Closed polyline approximation of the kernel zero contour: n_points + 1
/// entries at theta_j = 2 pi j / n_points, j = 0..n_points, so the first and
/// last entries coincide. Requires n_points >= 8.
std::vector<ContourPoint> trace_contour(const SymmetricModel& sym, int n_points);

} // namespace pollinglab
