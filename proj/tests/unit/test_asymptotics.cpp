#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pollinglab/asymptotics.hpp"
#include "pollinglab/transforms.hpp"
#include "test_support.hpp"

using namespace pollinglab;
using test_support::base_model;
using test_support::heavy_tail_model;

namespace {

// base-model family with lambda1 tuned to a target stability gap
PollingModel gapped_model(double gap) {
    return PollingModel({0.5 - gap, ServiceDistribution::exponential(1.0), 1.0},
                        {0.05, ServiceDistribution::exponential(1.0), 1.0});
}

} // namespace

TEST_CASE("heavy-traffic coefficients") {
    const HeavyTrafficCoefficients c = ht_coefficients(base_model());
    CHECK(c.a0 == doctest::Approx(0.4));
    // a1 = rho/(c1+c2) (1 - rho + (c1+c2) E B^2/(2 E B)); the spec's worked
    // example drops the (c1+c2) factor, the formula value is 0.145 and is
    // pinned by the a1(rho -> bound) = ht_limit_mean identity below
    CHECK(c.a1 == doctest::Approx(0.145));
    CHECK(c.a2 == doctest::Approx(0.28));

    // exact rearrangement: a1 (c1+c2) = rho(1-rho) + (c1+c2) rho E B^2/(2 E B)
    for (double lambda : {0.05, 0.2, 0.4}) {
        const PollingModel m({lambda, ServiceDistribution::erlang(2, 4.0), 0.7},
                             {0.01, ServiceDistribution::exponential(1.0), 1.3});
        const HeavyTrafficCoefficients h = ht_coefficients(m);
        const double rho = m.rho(1);
        const double csum = 2.0;
        const double m2_over_2m1 = m.q1().service.moment(2) / (2.0 * m.q1().service.moment(1));
        CHECK(h.a1 * csum ==
              doctest::Approx(rho * (1.0 - rho) + csum * rho * m2_over_2m1).epsilon(1e-14));
    }

    // c2 -> infinity: the isolated-queue term dominates a1 (c1+c2)
    const PollingModel fast({0.1, ServiceDistribution::exponential(1.0), 1.0},
                            {0.0001, ServiceDistribution::exponential(1.0), 1e8});
    const HeavyTrafficCoefficients h = ht_coefficients(fast);
    const double csum = 1.0 + 1e8;
    CHECK(h.a1 * csum / (csum * 0.1 * 1.0) == doctest::Approx(1.0).epsilon(1e-7));

    // a0 may be negative for an unstable queue; coefficients still evaluate
    const PollingModel unstable({0.7, ServiceDistribution::exponential(1.0), 1.0},
                                {0.1, ServiceDistribution::exponential(1.0), 1.0});
    CHECK(ht_coefficients(unstable).a0 < 0.0);

    CHECK_THROWS_AS(ht_coefficients(heavy_tail_model()), Error);
}

TEST_CASE("heavy-traffic limit mean") {
    CHECK(ht_limit_mean(base_model()) == doctest::Approx(0.625));

    // a1 evaluated at rho1 = bound equals the limit mean (algebraic identity)
    for (double c2 : {0.5, 1.0, 2.0}) {
        const double bound = c2 / (1.0 + c2);
        const PollingModel at_bound({bound, ServiceDistribution::exponential(1.0), 1.0},
                                    {0.01, ServiceDistribution::exponential(1.0), c2});
        CHECK(ht_coefficients(at_bound).a1 ==
              doctest::Approx(ht_limit_mean(at_bound)).epsilon(1e-14));
    }

    // c2 -> infinity: reduces to the M/G/1 heavy-traffic mean E B^2/(2 E B)
    const PollingModel fast({0.1, ServiceDistribution::exponential(1.0), 1.0},
                            {0.0001, ServiceDistribution::exponential(1.0), 1e8});
    CHECK(ht_limit_mean(fast) == doctest::Approx(1.0).epsilon(1e-6));

    const PollingModel det({0.1, ServiceDistribution::deterministic(1.0), 1.0},
                           {0.1, ServiceDistribution::exponential(1.0), 2.0});
    CHECK(ht_limit_mean(det) == doctest::Approx(2.0 / 27.0 + (2.0 / 3.0) * 0.5));
}

TEST_CASE("heavy-traffic scaled transform converges to 1/(1+s a1)") {
    CHECK(ht_scaled_lst(base_model(), 0.0).real() == doctest::Approx(1.0));

    const double gaps[] = {1e-3, 1e-4};
    double sup_prev = 1.0;
    for (double gap : gaps) {
        const PollingModel m = gapped_model(gap);
        const double a1 = ht_coefficients(m).a1;
        double sup = 0.0;
        for (double s : {0.5, 1.0, 2.0}) {
            const double limit = 1.0 / (1.0 + s * a1);
            sup = std::max(sup, std::abs(ht_scaled_lst(m, s).real() - limit));
        }
        CHECK(sup < (gap == 1e-3 ? 1e-2 : 1e-3));
        CHECK(sup < sup_prev);  // deviation shrinks with the gap
        sup_prev = sup;
    }
}

TEST_CASE("regularly varying tail prefactors") {
    const PollingModel m = heavy_tail_model();
    const TailAsymptote v1 = heavy_tail_asymptote(m, TailComponent::v1);
    const TailAsymptote mg1 = heavy_tail_asymptote(m, TailComponent::mg1);
    const TailAsymptote y = heavy_tail_asymptote(m, TailComponent::y);

    CHECK(v1.prefactor == doctest::Approx(1.0));
    CHECK(v1.exponent == doctest::Approx(-0.5));
    CHECK(std::abs(mg1.prefactor + y.prefactor - v1.prefactor) < 1e-14);

    // oracle pairing: the big-jump integral at x = 400 within 2 percent
    CHECK(one_big_jump_integral(m, 400.0) ==
          doctest::Approx(v1.prefactor * std::pow(400.0, v1.exponent)).epsilon(0.02));

    // c2 large: M/G/1 prefactor rho/((1-rho) E B (nu-1))
    const PollingModel fast({0.1, ServiceDistribution::pareto(1.5, 1.0), 1.0},
                            {0.001, ServiceDistribution::exponential(1.0), 1e8});
    CHECK(heavy_tail_asymptote(fast, TailComponent::v1).prefactor ==
          doctest::Approx(0.3 / (0.7 * 3.0 * 0.5)).epsilon(1e-6));

    const PollingModel nu_too_large({0.1, ServiceDistribution::pareto(2.5, 1.0), 1.0},
                                    {0.1, ServiceDistribution::exponential(1.0), 1.0});
    CHECK_THROWS_AS(heavy_tail_asymptote(nu_too_large, TailComponent::v1), Error);
    CHECK_THROWS_AS(heavy_tail_asymptote(base_model(), TailComponent::v1), Error);
}

TEST_CASE("subexponential tail approximation") {
    const PollingModel m = heavy_tail_model();
    CHECK(subexp_tail_approx(m, 100.0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(subexp_tail_approx(m, 0.0) == doctest::Approx(1.5));  // prefactor * 1

    // ratio against the pure power asymptote tends to 1
    const TailAsymptote v1 = heavy_tail_asymptote(m, TailComponent::v1);
    double prev_err = 1e9;
    for (double x : {10.0, 100.0, 1000.0}) {
        const double ratio =
            subexp_tail_approx(m, x) / (v1.prefactor * std::pow(x, v1.exponent));
        CHECK(std::abs(ratio - 1.0) < prev_err + 1e-15);
        prev_err = std::abs(ratio - 1.0);
    }
    CHECK(prev_err < 1e-10);  // exact for Pareto beyond the scale
}

TEST_CASE("one-big-jump integral is the quadrature twin") {
    const PollingModel m = heavy_tail_model();
    CHECK(one_big_jump_integral(m, 100.0) == doctest::Approx(0.1).epsilon(1e-6));

    // identity with the closed-form route, heavy and light tails alike
    for (double x : {0.0, 1.0, 25.0, 100.0})
        CHECK(std::abs(one_big_jump_integral(m, x) - subexp_tail_approx(m, x)) < 1e-8);
    const PollingModel light = base_model();
    for (double x : {0.0, 0.5, 3.0})
        CHECK(std::abs(one_big_jump_integral(light, x) - subexp_tail_approx(light, x)) <
              1e-8);

    // doubling x scales the Pareto tail by 2^{1-nu}
    const double ratio = one_big_jump_integral(m, 200.0) / one_big_jump_integral(m, 100.0);
    CHECK(ratio == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-6));
}

TEST_CASE("contraction coefficient") {
    const PollingModel m({0.4 / 3.0, ServiceDistribution::pareto(1.5, 1.0), 1.0},
                         {0.05, ServiceDistribution::exponential(1.0), 1.0});
    // rho1 = 0.4, gap = 0.1, L = 1: Delta = (0.1/0.4)^2 = 0.0625
    CHECK(m.rho(1) == doctest::Approx(0.4));
    const double delta = contraction_delta(m, 1.5);
    CHECK(delta == doctest::Approx(0.0625).epsilon(1e-12));

    // residual of the defining equation
    CHECK(std::abs(std::pow(delta, 0.5) * 1.0 - 0.1 / 0.4) < 1e-12);

    // halving the gap scales Delta by 2^{-1/(nu-1)} = 1/4
    const PollingModel half({0.45 / 3.0, ServiceDistribution::pareto(1.5, 1.0), 1.0},
                            {0.05, ServiceDistribution::exponential(1.0), 1.0});
    CHECK(contraction_delta(half, 1.5) / delta == doctest::Approx(0.25).epsilon(1e-12));

    // strictly decreasing in rho1
    double prev = 1e9;
    for (double lambda : {0.05, 0.08, 0.11, 0.14}) {
        const PollingModel mm({lambda, ServiceDistribution::pareto(1.5, 1.0), 1.0},
                              {0.05, ServiceDistribution::exponential(1.0), 1.0});
        const double d = contraction_delta(mm, 1.5);
        CHECK(d < prev);
        prev = d;
    }

    CHECK_THROWS_AS(contraction_delta(m, 2.5), Error);
}

TEST_CASE("mittag-leffler limit transform") {
    CHECK(mittag_leffler_limit_lst(1.0, 1.5, 0.0) == doctest::Approx(1.0));
    CHECK(mittag_leffler_limit_lst(1.0, 1.5, 1.0) == doctest::Approx(0.5));
    // nu -> 2 recovers the exponential-transform shape 1/(1 + E B s)
    for (double s : {0.3, 1.0, 4.0})
        CHECK(mittag_leffler_limit_lst(2.0, 1.999999, s) ==
              doctest::Approx(1.0 / (1.0 + 2.0 * s)).epsilon(1e-4));
}

TEST_CASE("work conservation comparison") {
    const WorkConservationGap gap = work_conservation_gap(base_model());
    CHECK(gap.polling_total == doctest::Approx(0.625));
    CHECK(gap.conserving_total == doctest::Approx(0.25));

    // strict inequality across a 20-point sweep
    for (int i = 0; i < 20; ++i) {
        const double lambda = 0.02 + 0.02 * i;   // rho in (0, 0.42)
        const double c = 0.3 + 0.15 * i;
        const PollingModel m({lambda, ServiceDistribution::exponential(1.0), c},
                             {lambda, ServiceDistribution::exponential(1.0), c});
        const WorkConservationGap g = work_conservation_gap(m);
        CHECK(g.polling_total > g.conserving_total);
    }

    // c -> infinity: the polling total approaches twice the conserving total
    const PollingModel fast({0.1, ServiceDistribution::exponential(1.0), 1e7},
                            {0.1, ServiceDistribution::exponential(1.0), 1e7});
    const WorkConservationGap g = work_conservation_gap(fast);
    CHECK(g.polling_total == doctest::Approx(2.0 * g.conserving_total).epsilon(1e-5));

    CHECK_THROWS_AS(work_conservation_gap(PollingModel(
                        {0.1, ServiceDistribution::exponential(1.0), 1.0},
                        {0.2, ServiceDistribution::exponential(1.0), 1.0})),
                    Error);
}
