#include "pollinglab/laplace.hpp"

#include <array>
#include <cmath>

#include "pollinglab/errors.hpp"

namespace pollinglab {

namespace {

constexpr double kA = 18.4;  // discretization parameter
constexpr int kBaseTerms = 38;
constexpr int kEulerTerms = 11;
constexpr double kPi = 3.14159265358979323846;

} // namespace

LaplaceInversionResult invert_laplace(
    const std::function<std::complex<double>(std::complex<double>)>& transform, double t) {
    require(t > 0.0, Errc::validation, "laplace inversion requires t > 0");

    const double half_a_over_t = kA / (2.0 * t);
    const double scale = std::exp(kA / 2.0) / t;

    // partial sums of the alternating series
    std::array<double, kBaseTerms + kEulerTerms + 1> partial{};
    double running = 0.5 * transform(std::complex<double>(half_a_over_t, 0.0)).real();
    partial[0] = running;
    for (int k = 1; k <= kBaseTerms + kEulerTerms; ++k) {
        const std::complex<double> s(half_a_over_t, k * kPi / t);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        running += sign * transform(s).real();
        partial[static_cast<std::size_t>(k)] = running;
    }

    // binomial (Euler) averaging of kEulerTerms+1 partial sums starting at n
    const auto euler_average = [&partial](int n) {
        double binom = 1.0;  // C(m, 0)
        double weighted = partial[static_cast<std::size_t>(n)];
        for (int j = 1; j <= kEulerTerms; ++j) {
            binom *= static_cast<double>(kEulerTerms - j + 1) / j;
            weighted += binom * partial[static_cast<std::size_t>(n + j)];
        }
        return weighted / std::pow(2.0, kEulerTerms);
    };

    const double value = scale * euler_average(kBaseTerms);
    // shifting the averaging window by one term estimates the truncation error
    const double prev = scale * euler_average(kBaseTerms - 1);
    const double aliasing = std::exp(-kA) / (1.0 - std::exp(-kA));

    return {value, std::abs(value - prev) + aliasing};
}

} // namespace pollinglab
