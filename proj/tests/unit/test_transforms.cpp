#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pollinglab/quadrature.hpp"
#include "pollinglab/transforms.hpp"
#include "test_support.hpp"

using namespace pollinglab;
using test_support::base_model;

namespace {

// parameter sets spanning the light-tailed variants and asymmetric timers;
// queue 2 is kept lightly loaded so the whole model is stable
std::vector<PollingModel> sweep_models() {
    const auto exp1 = ServiceDistribution::exponential(1.0);
    return {
        base_model(),
        PollingModel({0.15, ServiceDistribution::deterministic(1.5), 0.5},
                     {0.05, ServiceDistribution::exponential(2.0), 2.0}),
        PollingModel({0.2, ServiceDistribution::erlang(3, 2.0), 1.0}, {0.01, exp1, 3.0}),
        PollingModel({0.3, ServiceDistribution::hyper_exponential({0.4, 0.6}, {1.0, 3.0}),
                      2.0},
                     {0.05, exp1, 1.0}),
        PollingModel({0.05, ServiceDistribution::erlang(2, 1.0), 0.3}, {0.02, exp1, 0.7}),
    };
}

} // namespace

TEST_CASE("busy period: proper root, closed-form cross-check, residual") {
    const auto exp1 = ServiceDistribution::exponential(1.0);
    CHECK(busy_period_lst(0.1, exp1, 0.0).real() == doctest::Approx(1.0).epsilon(1e-12));

    // quadratic root (2.1 - sqrt(4.01)) / 0.2 for Exp(1) service at s = 1
    const double closed_form = (2.1 - std::sqrt(4.01)) / 0.2;
    CHECK(busy_period_lst(0.1, exp1, 1.0).real() ==
          doctest::Approx(closed_form).epsilon(1e-12));

    const auto det1 = ServiceDistribution::deterministic(1.0);
    const Complex z = busy_period_lst(0.1, det1, 0.5);
    CHECK(std::abs(z - det1.lst(0.5 + (1.0 - z) * 0.1)) < 1e-12);

    // fixed-point residual at the returned value, across variants and points
    for (const auto& model : sweep_models()) {
        const auto& q = model.q1();
        for (int i = 0; i < 10; ++i) {
            const Complex s(test_support::quasi_point(i, 0.0, 5.0),
                            test_support::quasi_point(3 * i + 1, -2.0, 2.0));
            const Complex root = busy_period_lst(q.lambda, q.service, s);
            CHECK(std::abs(root - q.service.lst(s + (1.0 - root) * q.lambda)) < 1e-12);
            CHECK(std::abs(root) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("mg1 workload: PK values and M/M/1 closed form") {
    const auto exp1 = ServiceDistribution::exponential(1.0);
    CHECK(mg1_workload_lst(0.1, exp1, 0.0).real() == doctest::Approx(1.0));
    CHECK(mg1_workload_lst(0.1, exp1, 1.0).real() ==
          doctest::Approx(0.9 / 0.95).epsilon(1e-12));

    // M/M/1 closed form (1-rho) + rho (mu-lambda)/(mu-lambda+s)
    for (int i = 0; i < 20; ++i) {
        const double s = test_support::quasi_point(i, 0.01, 10.0);
        const double mm1 = 0.9 + 0.1 * 0.9 / (0.9 + s);
        CHECK(mg1_workload_lst(0.1, exp1, s).real() == doctest::Approx(mm1).epsilon(1e-12));
    }

    // derivative at 0+  ->  rho E B^2 / (2 (1-rho) E B)
    const double mean = test_support::derivative_at_zero(
        [&exp1](double s) { return -mg1_workload_lst(0.1, exp1, s).real(); }, 1e-5);
    CHECK(-mean == doctest::Approx(-0.1 * 2.0 / (2.0 * 0.9)).epsilon(1e-5));

    CHECK_THROWS_AS(mg1_workload_lst(1.5, exp1, 1.0), Error);
}

TEST_CASE("marginal workload: normalization and decomposition identity") {
    const PollingModel model = base_model();
    CHECK(marginal_workload_lst(model, 1, 0.0).real() == doctest::Approx(1.0));

    // Corollary-level product identity on 100 quasi-random transform points
    // for every sweep model, queue 1 and queue 2
    for (const auto& m : sweep_models()) {
        for (int queue = 1; queue <= 2; ++queue) {
            const PollingModel view = queue == 1 ? m : m.mirrored();
            if (view.q1().service.heavy_tailed()) continue;
            for (int i = 0; i < 100; ++i) {
                const Complex s(test_support::quasi_point(i, 0.01, 20.0),
                                test_support::quasi_point(7 * i + 3, -10.0, 10.0));
                const Complex lhs = marginal_workload_lst(m, queue, s);
                const Complex rhs =
                    mg1_workload_lst(view.q1().lambda, view.q1().service, s) * y_lst(view, s);
                CHECK(std::abs(lhs - rhs) < 1e-12);
            }
        }
    }

    // derivative of the base-model transform reproduces the mean 0.3125
    const double mean = -test_support::derivative_at_zero(
        [&model](double s) { return marginal_workload_lst(model, 1, s).real(); }, 1e-5);
    CHECK(mean == doctest::Approx(0.3125).epsilon(1e-5 / 0.3125));

    // complete-monotonicity consistency on the real axis
    for (const auto& m : sweep_models()) {
        double prev = 1.0 + 1e-15;
        for (int i = 0; i <= 200; ++i) {
            const double s = 20.0 * i / 200.0;
            const double v = marginal_workload_lst(m, 1, s).real();
            CHECK(v > 0.0);
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
    }

    // swapping queue labels and querying queue 2 is exactly queue 1 mirrored
    for (const auto& m : sweep_models()) {
        for (int i = 0; i < 10; ++i) {
            const Complex s(test_support::quasi_point(i, 0.01, 10.0), 0.3);
            CHECK(marginal_workload_lst(m, 2, s) ==
                  marginal_workload_lst(m.mirrored(), 1, s));
        }
    }

    CHECK_THROWS_AS(
        marginal_workload_lst(
            PollingModel({0.6, ServiceDistribution::exponential(1.0), 1.0},
                         {0.1, ServiceDistribution::exponential(1.0), 1.0}),
            1, 1.0),
        Error);
    CHECK_THROWS_AS(marginal_workload_lst(test_support::heavy_tail_model(), 1, 1.0), Error);
}

TEST_CASE("switch epoch and visit mixture identities") {
    CHECK(switch_epoch_lst(base_model(), 0.0).real() == doctest::Approx(1.0));

    for (const auto& m : sweep_models()) {
        const double c1 = m.q1().c, c2 = m.q2().c;
        for (int i = 0; i < 40; ++i) {
            const Complex s(test_support::quasi_point(i, 0.01, 15.0),
                            test_support::quasi_point(5 * i + 2, -6.0, 6.0));
            const Complex sw = switch_epoch_lst(m, s);
            const Complex ve = visit_end_lst(m, s);

            // dividing out the accumulated-arrivals factor recovers the
            // visit-end transform
            const Complex damping =
                c2 / (c2 + m.q1().lambda * (1.0 - m.q1().service.lst(s)));
            CHECK(std::abs(sw - ve * damping) < 1e-12);

            // mixing with the server-position weights reproduces the marginal
            const Complex mixture = (c2 * ve + c1 * sw) / (c1 + c2);
            CHECK(std::abs(mixture - marginal_workload_lst(m, 1, s)) < 1e-12);
        }
    }
}

TEST_CASE("y transform: normalization and mean") {
    const PollingModel model = base_model();
    CHECK(y_lst(model, 0.0).real() == doctest::Approx(1.0));

    // E Y = E V1 - E V_{M/G/1} = 0.3125 - 1/9
    const double mean_y = -test_support::derivative_at_zero(
        [&model](double s) { return y_lst(model, s).real(); }, 1e-5);
    CHECK(mean_y == doctest::Approx(0.3125 - 1.0 / 9.0).epsilon(1e-4));
}

TEST_CASE("workload mean: closed form, M/G/1 degeneration") {
    CHECK(workload_mean(base_model(), 1) == doctest::Approx(0.3125));

    // c2 -> infinity: classical M/G/1 mean rho E B^2 / (2 (1-rho) E B)
    const PollingModel fast_timer({0.1, ServiceDistribution::exponential(1.0), 1.0},
                                  {0.0, ServiceDistribution::exponential(1.0), 1e8});
    CHECK(workload_mean(fast_timer, 1) == doctest::Approx(1.0 / 9.0).epsilon(1e-6));

    const PollingModel det_model({0.1, ServiceDistribution::deterministic(1.0), 1.0},
                                 {0.1, ServiceDistribution::exponential(1.0), 1.0});
    CHECK(workload_mean(det_model, 1) == doctest::Approx(0.1875));

    CHECK_THROWS_AS(workload_mean(test_support::heavy_tail_model(), 1), Error);
}

TEST_CASE("workload variance: closed form, degeneration, transform oracle") {
    // frozen from two independent routes: second transform derivative at 0+
    // and Var(V_mg1) + Var(Y) assembled by hand (19/81 + 0.494338...)
    CHECK(workload_variance(base_model(), 1) == doctest::Approx(0.72890625));

    // c2 -> infinity: M/G/1 variance lambda E B^3/(3(1-rho)) + (lambda E B^2)^2/(4(1-rho)^2)
    const PollingModel fast_timer({0.1, ServiceDistribution::exponential(1.0), 1.0},
                                  {0.0, ServiceDistribution::exponential(1.0), 1e8});
    const double mg1_var = 0.1 * 6.0 / (3.0 * 0.9) + 0.04 / (4.0 * 0.81);
    CHECK(workload_variance(fast_timer, 1) == doctest::Approx(mg1_var).epsilon(1e-6));

    // second derivative of the transform at 0+ minus mean^2
    const PollingModel model = base_model();
    const double m2 = test_support::second_derivative_at_zero(
        [&model](double s) { return marginal_workload_lst(model, 1, s).real(); }, 1e-4);
    const double var = m2 - 0.3125 * 0.3125;
    CHECK(workload_variance(model, 1) == doctest::Approx(var).epsilon(1e-3));
}

TEST_CASE("workload cdf: properness, monotonicity, quadrature oracle") {
    const PollingModel model = base_model();
    CHECK(invert_workload_cdf(model, 1, 50.0) >= 0.9999);

    double prev = 0.0;
    for (int i = 0; i <= 60; ++i) {
        const double x = 0.02 + 6.0 * i / 60.0;
        const double v = invert_workload_cdf(model, 1, x);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v >= prev - 1e-8);
        prev = v;
    }

    // atom at zero equals the large-s transform limit, and the CDF
    // approaches it from above as x -> 0+
    const double atom = workload_atom(model, 1);
    CHECK(atom == doctest::Approx(0.8 * 2.1 / 2.2).epsilon(1e-9));
    CHECK(invert_workload_cdf(model, 1, 1e-3) == doctest::Approx(atom).epsilon(1e-3));

    // int_0^inf (1 - CDF) recovers the mean
    const double mean = integrate(
        [&model](double x) {
            return x == 0.0 ? 1.0 - workload_atom(model, 1)
                            : 1.0 - invert_workload_cdf(model, 1, x);
        },
        0.0, 40.0, 1e-6, 8000);
    CHECK(mean == doctest::Approx(0.3125).epsilon(1e-3));

    CHECK_THROWS_AS(invert_workload_cdf(test_support::heavy_tail_model(), 1, 1.0), Error);
}
