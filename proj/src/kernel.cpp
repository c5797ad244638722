#include "pollinglab/kernel.hpp"

#include <cmath>

namespace pollinglab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kResidualTol = 1e-12;

struct ContourEquation {
    const SymmetricModel& sym;
    double cos_rhs, sin_rhs;  // c e^{i theta}

    double im_z() const { return -sym.c * sin_rhs; }

    // real part of c - z + 2 lambda Re(1 - lst(z)) - c e^{i theta}
    double residual(double re_z) const {
        const Complex z(re_z, im_z());
        const double drift = 2.0 * sym.lambda * (1.0 - sym.service.lst(z).real());
        return sym.c - re_z + drift - sym.c * cos_rhs;
    }

    double residual_derivative(double re_z) const {
        const Complex z(re_z, im_z());
        return -1.0 - 2.0 * sym.lambda * sym.service.lst_derivative(z).real();
    }
};

// damped Newton with a bisection safeguard on the bracket [0, hi]; the
// residual is strictly decreasing in Re z under lambda E B < 1/2
double solve_real_part(const ContourEquation& eq, double seed) {
    double lo = 0.0;
    double f_lo = eq.residual(lo);
    if (f_lo <= kResidualTol) return 0.0;  // theta = 0 (mod 2 pi)

    double hi = std::max(1.0, 2.0 * seed);
    double f_hi = eq.residual(hi);
    int expand = 0;
    while (f_hi > 0.0) {
        hi *= 2.0;
        f_hi = eq.residual(hi);
        if (++expand > 200)
            fail(Errc::root_not_found, "contour bracket expansion failed");
    }

    double x = std::min(std::max(seed, lo), hi);
    double f = eq.residual(x);
    double prev_abs = std::abs(f);
    for (int it = 0; it < 200; ++it) {
        if (std::abs(f) <= kResidualTol) return x;
        const double deriv = eq.residual_derivative(x);
        double step = deriv != 0.0 ? -f / deriv : 0.5 * (hi - lo) * (f > 0 ? 1 : -1);
        // damping factor 0.5 whenever the residual stopped shrinking
        if (std::abs(f) >= prev_abs) step *= 0.5;
        double next = x + step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
        const double f_next = eq.residual(next);
        if (f_next > 0.0)
            lo = next;
        else
            hi = next;
        prev_abs = std::abs(f);
        x = next;
        f = f_next;
    }
    fail(Errc::root_not_found, "contour Newton iteration did not converge");
}

} // namespace

SymmetricModel::SymmetricModel(double lambda_in, ServiceDistribution service_in, double c_in)
    : lambda(lambda_in), service(std::move(service_in)), c(c_in) {
    require(std::isfinite(lambda) && lambda >= 0.0, Errc::validation, "lambda must be >= 0");
    require(std::isfinite(c) && c > 0.0, Errc::validation, "timer rate c must be > 0");
    require(!service.heavy_tailed(), Errc::heavy_tail_no_lst,
            "contour tracing needs a light-tailed service law");
    require(lambda * service.mean() < 0.5, Errc::unstable,
            "symmetric model requires lambda E B < 1/2");
}

PollingModel SymmetricModel::as_polling_model() const {
    return PollingModel({lambda, service, c}, {lambda, service, c});
}

Complex kernel_eval(const SymmetricModel& sym, Complex s1, Complex s2) {
    require(s1.real() >= 0.0 && s2.real() >= 0.0, Errc::validation,
            "kernel arguments require Re s >= 0");
    const Complex drift =
        sym.lambda * (1.0 - sym.service.lst(s1)) + sym.lambda * (1.0 - sym.service.lst(s2));
    return sym.c * sym.c - (sym.c - s1 + drift) * (sym.c - s2 + drift);
}

Complex contour_point(const SymmetricModel& sym, double theta) {
    require(theta >= 0.0 && theta <= 2.0 * kPi + 1e-12, Errc::validation,
            "theta must lie in [0, 2 pi]");
    const ContourEquation eq{sym, std::cos(theta), std::sin(theta)};
    const double re = solve_real_part(eq, sym.c * (1.0 - std::cos(theta)));
    return {re, eq.im_z()};
}

std::vector<ContourPoint> trace_contour(const SymmetricModel& sym, int n_points) {
    require(n_points >= 8, Errc::validation, "contour trace needs n_points >= 8");
    std::vector<ContourPoint> points;
    points.reserve(static_cast<std::size_t>(n_points) + 1);
    double seed = 0.0;
    for (int j = 0; j <= n_points; ++j) {
        const double theta = 2.0 * kPi * j / n_points;
        const ContourEquation eq{sym, std::cos(theta), std::sin(theta)};
        double re;
        try {
            re = solve_real_part(eq, seed);  // continuation from previous theta
        } catch (const Error& e) {
            if (e.code() != Errc::root_not_found) throw;
            fail(Errc::root_not_found,
                 "contour trace failed at theta = " + std::to_string(theta));
        }
        seed = re;
        const Complex z(re, eq.im_z());
        points.push_back({theta, z, std::abs(kernel_eval(sym, z, std::conj(z)))});
    }
    return points;
}

} // namespace pollinglab
