#pragma once

#include <cmath>
#include <complex>
#include <functional>

#include "pollinglab/model.hpp"

namespace test_support {

using pollinglab::PollingModel;
using pollinglab::ServiceDistribution;

inline PollingModel base_model() {
    return PollingModel({0.1, ServiceDistribution::exponential(1.0), 1.0},
                        {0.1, ServiceDistribution::exponential(1.0), 1.0});
}

inline PollingModel heavy_tail_model() {
    return PollingModel({0.1, ServiceDistribution::pareto(1.5, 1.0), 1.0},
                        {0.1, ServiceDistribution::exponential(1.0), 1.0});
}

// second-order one-sided first derivative at 0+, keeping all evaluations in
// the Re s >= 0 domain
inline double derivative_at_zero(const std::function<double(double)>& f, double h) {
    return (-3.0 * f(0.0) + 4.0 * f(h) - f(2.0 * h)) / (2.0 * h);
}

// second-order one-sided second derivative at 0+
inline double second_derivative_at_zero(const std::function<double(double)>& f, double h) {
    return (2.0 * f(0.0) - 5.0 * f(h) + 4.0 * f(2.0 * h) - f(3.0 * h)) / (h * h);
}

// golden-ratio low-discrepancy sequence on [lo, hi]
inline double quasi_point(int index, double lo, double hi) {
    const double golden = 0.6180339887498949;
    double u = std::fmod(0.5 + golden * index, 1.0);
    return lo + u * (hi - lo);
}

} // namespace test_support
