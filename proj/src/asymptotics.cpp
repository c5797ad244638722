#include "pollinglab/asymptotics.hpp"

#include <cmath>

#include "pollinglab/quadrature.hpp"
#include "pollinglab/transforms.hpp"

namespace pollinglab {

namespace {

double stability_gap(const PollingModel& model) {
    const double csum = model.q1().c + model.q2().c;
    return model.q2().c / csum - model.rho(1);
}

const ServiceDistribution& require_pareto_queue1(const PollingModel& model) {
    const ServiceDistribution& b = model.q1().service;
    require(b.kind() == ServiceDistribution::Kind::pareto, Errc::not_regularly_varying,
            "tail asymptotics require Pareto service at queue 1");
    const double nu = b.tail_index();
    require(nu > 1.0 && nu < 2.0, Errc::not_regularly_varying,
            "tail asymptotics require tail index in (1,2)");
    return b;
}

} // namespace

HeavyTrafficCoefficients ht_coefficients(const PollingModel& model) {
    const ServiceDistribution& b = model.q1().service;
    const double m1 = b.moment(1);
    const double m2 = b.moment(2);
    const double m3 = b.moment(3);
    require(std::isfinite(m2) && std::isfinite(m3), Errc::infinite_moment,
            "heavy-traffic coefficients need three finite service moments");
    const double csum = model.q1().c + model.q2().c;
    const double rho = model.rho(1);
    HeavyTrafficCoefficients out{};
    out.a0 = model.q2().c / csum - rho;
    out.a1 = rho / csum * (1.0 - rho + csum * 0.5 * m2 / m1);
    out.a2 = rho * rho / csum *
             ((1.0 - 2.0 * rho) / rho * m2 / m1 + csum / (3.0 * rho) * m3 / m1);
    return out;
}

double ht_limit_mean(const PollingModel& model) {
    const ServiceDistribution& b = model.q1().service;
    const double m2 = b.moment(2);
    require(std::isfinite(m2), Errc::infinite_moment,
            "heavy-traffic limit mean needs a finite second service moment");
    const double c1 = model.q1().c, c2 = model.q2().c;
    const double csum = c1 + c2;
    return c1 * c2 / (csum * csum * csum) + c2 / csum * 0.5 * m2 / b.moment(1);
}

Complex ht_scaled_lst(const PollingModel& model, Complex s) {
    const double a0 = stability_gap(model);
    return marginal_workload_lst(model, 1, s * a0);
}

TailAsymptote heavy_tail_asymptote(const PollingModel& model, TailComponent which) {
    const ServiceDistribution& b = require_pareto_queue1(model);
    require_stable(model);
    const double nu = b.tail_index();
    const double slowly_varying = b.tail_slowly_varying_constant();
    const double m1 = b.moment(1);
    const double rho = model.rho(1);
    const double c1 = model.q1().c, c2 = model.q2().c;
    const double csum = c1 + c2;
    const double base = slowly_varying / (m1 * (nu - 1.0));

    TailAsymptote out{};
    out.exponent = 1.0 - nu;
    switch (which) {
        case TailComponent::v1:
            out.prefactor = rho / (c2 / csum - rho) * base;
            out.note = "P(V1 > x) ~ C x^{1-nu} as x -> inf";
            break;
        case TailComponent::mg1:
            out.prefactor = rho / (1.0 - rho) * base;
            out.note = "isolated M/G/1 workload tail";
            break;
        case TailComponent::y:
            out.prefactor = rho * c1 / ((1.0 - rho) * (c2 - rho * csum)) * base;
            out.note = "tail of the decomposition term Y";
            break;
    }
    return out;
}

double subexp_tail_approx(const PollingModel& model, double x) {
    require(x >= 0.0, Errc::validation, "tail level x must be >= 0");
    require_stable(model);
    const double rho = model.rho(1);
    require(std::isfinite(model.q1().service.moment(1)), Errc::infinite_moment,
            "subexponential approximation needs a finite mean service time");
    return rho / stability_gap(model) * model.q1().service.residual_survival(x);
}

double one_big_jump_integral(const PollingModel& model, double x) {
    require(x >= 0.0, Errc::validation, "tail level x must be >= 0");
    require_stable(model);
    const ServiceDistribution& b = model.q1().service;
    const double gap = stability_gap(model);
    // exact change of variables z = x + y gap turns the big-jump integral
    // into (lambda1/gap) int_x^inf P(B > z) dz, evaluated by quadrature
    double power = 2.0;
    if (b.heavy_tailed()) power = std::max(2.0, 1.5 / (b.tail_index() - 1.0));
    const double tail_integral = integrate_tail([&b](double z) { return b.survival(z); },
                                                x, std::max(b.moment(1), 1e-3), power);
    return model.q1().lambda / gap * tail_integral;
}

double contraction_delta(const PollingModel& model, double nu) {
    require(nu > 1.0 && nu < 2.0, Errc::not_regularly_varying,
            "contraction coefficient requires tail index in (1,2)");
    const ServiceDistribution& b = require_pareto_queue1(model);
    require_stable(model);
    const double slowly_varying = std::pow(b.pareto_scale(), nu);
    const double gap = stability_gap(model);
    const double rho = model.rho(1);
    return std::pow(gap / (rho * slowly_varying), 1.0 / (nu - 1.0));
}

double mittag_leffler_limit_lst(double mean_b, double nu, double s) {
    require(nu > 1.0 && nu < 2.0, Errc::not_regularly_varying,
            "Mittag-Leffler limit requires tail index in (1,2)");
    require(mean_b > 0.0 && s >= 0.0, Errc::validation, "need mean_b > 0 and s >= 0");
    return 1.0 / (1.0 + std::pow(mean_b, nu - 1.0) * std::pow(s, nu - 1.0));
}

WorkConservationGap work_conservation_gap(const PollingModel& model) {
    const bool symmetric = model.q1().lambda == model.q2().lambda &&
                           model.q1().c == model.q2().c &&
                           model.q1().service == model.q2().service;
    require(symmetric, Errc::asymmetric_model,
            "work-conservation comparison is defined for the symmetric model");
    require_stable(model);
    WorkConservationGap out{};
    out.polling_total = workload_mean(model, 1) + workload_mean(model, 2);
    const double total_rho = 2.0 * model.rho(1);
    const ServiceDistribution& b = model.q1().service;
    out.conserving_total =
        total_rho / (1.0 - total_rho) * 0.5 * b.moment(2) / b.moment(1);
    return out;
}

} // namespace pollinglab
