#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "pollinglab/model.hpp"
#include "pollinglab/quadrature.hpp"
#include "pollinglab/rng.hpp"
#include "test_support.hpp"

using namespace pollinglab;

namespace {

std::vector<ServiceDistribution> all_variants() {
    return {ServiceDistribution::exponential(1.0),
            ServiceDistribution::deterministic(2.0),
            ServiceDistribution::erlang(3, 2.0),
            ServiceDistribution::hyper_exponential({0.4, 0.6}, {1.0, 3.0}),
            ServiceDistribution::pareto(1.5, 1.0)};
}

} // namespace

TEST_CASE("moments: closed forms") {
    CHECK(ServiceDistribution::exponential(1.0).moment(2) == doctest::Approx(2.0));
    CHECK(ServiceDistribution::deterministic(3.0).moment(3) == doctest::Approx(27.0));
    CHECK(std::isinf(ServiceDistribution::pareto(1.5, 1.0).moment(2)));
    CHECK(ServiceDistribution::pareto(1.5, 1.0).moment(1) == doctest::Approx(3.0));
    CHECK(ServiceDistribution::erlang(3, 2.0).moment(1) == doctest::Approx(1.5));
    CHECK(ServiceDistribution::erlang(3, 2.0).moment(2) == doctest::Approx(3.0));
    CHECK(ServiceDistribution::hyper_exponential({0.4, 0.6}, {1.0, 3.0}).moment(1) ==
          doctest::Approx(0.6));
    for (const auto& dist : all_variants()) CHECK(dist.moment(1) > 0.0);
    CHECK_THROWS_AS(ServiceDistribution::exponential(1.0).moment(4), Error);
}

TEST_CASE("lst: values and bounds") {
    CHECK(ServiceDistribution::exponential(1.0).lst(0.0).real() == doctest::Approx(1.0));
    CHECK(ServiceDistribution::exponential(1.0).lst(1.0).real() == doctest::Approx(0.5));
    CHECK(ServiceDistribution::deterministic(2.0).lst(0.5).real() ==
          doctest::Approx(std::exp(-1.0)));

    for (const auto& dist : all_variants()) {
        if (dist.heavy_tailed()) continue;
        CHECK(dist.lst(0.0).real() == doctest::Approx(1.0));
        for (int i = 0; i < 50; ++i) {
            const double s = test_support::quasi_point(i, 0.0, 25.0);
            CHECK(std::abs(dist.lst(Complex(s, 0.0))) <= 1.0 + 1e-12);
        }
    }

    CHECK_THROWS_AS(ServiceDistribution::pareto(1.5, 1.0).lst(1.0), Error);
    try {
        ServiceDistribution::pareto(1.5, 1.0).lst(1.0);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::heavy_tail_no_lst);
    }
    CHECK_THROWS_AS(ServiceDistribution::exponential(1.0).lst(Complex(-0.1, 0.0)), Error);
}

TEST_CASE("lst: finite-difference slope at 0+ matches the mean") {
    const double h = 1e-6;
    for (const auto& dist : all_variants()) {
        if (dist.heavy_tailed()) continue;
        const double slope = -(dist.lst(h).real() - dist.lst(0.0).real()) / h;
        CHECK(slope == doctest::Approx(dist.moment(1)).epsilon(1e-4));
        // closed-form derivative agrees too
        CHECK(-dist.lst_derivative(0.0).real() == doctest::Approx(dist.moment(1)));
    }
}

TEST_CASE("survival: range, monotonicity, pareto tail") {
    CHECK(ServiceDistribution::pareto(1.5, 1.0).survival(4.0) == doctest::Approx(0.125));
    for (const auto& dist : all_variants()) {
        double prev = 1.5;
        for (int i = 0; i <= 1000; ++i) {
            const double x = 12.0 * i / 1000.0;
            const double s = dist.survival(x);
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
            CHECK(s <= prev + 1e-15);
            prev = s;
        }
    }
}

TEST_CASE("residual survival: memorylessness, quadrature oracle") {
    const auto exp1 = ServiceDistribution::exponential(1.0);
    for (double x : {0.0, 0.3, 1.0, 4.0})
        CHECK(exp1.residual_survival(x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));

    // oracle: residual tail = int_x^inf survival / mean by quadrature
    for (const auto& dist : all_variants()) {
        const double power = dist.heavy_tailed() ? 1.5 / (dist.tail_index() - 1.0) : 2.0;
        for (double x : {0.0, 0.5, 2.0, 7.0}) {
            const double oracle =
                integrate_tail([&dist](double z) { return dist.survival(z); }, x,
                               dist.moment(1), power) /
                dist.moment(1);
            CHECK(dist.residual_survival(x) == doctest::Approx(oracle).epsilon(1e-8));
        }
    }
    // frozen value from the quadrature oracle: (2/3) * 100^{-1/2}
    CHECK(ServiceDistribution::pareto(1.5, 1.0).residual_survival(100.0) ==
          doctest::Approx(0.0666666667).epsilon(1e-8));
}

TEST_CASE("stability: direct inequalities and swap symmetry") {
    const auto exp1 = ServiceDistribution::exponential(1.0);
    {
        const StabilityReport r = check_stability(test_support::base_model());
        CHECK(r.stable);
        CHECK(r.rho1 == doctest::Approx(0.1));
        CHECK(r.bound1 == doctest::Approx(0.5));
    }
    {
        const PollingModel m({0.6, exp1, 1.0}, {0.1, exp1, 1.0});
        CHECK_FALSE(check_stability(m).stable);
    }
    {
        const PollingModel m({0.1, ServiceDistribution::pareto(1.5, 1.0), 1.0},
                             {0.1, exp1, 1.0});
        const StabilityReport r = check_stability(m);
        CHECK(r.stable);
        CHECK(r.rho1 == doctest::Approx(0.3));
    }

    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const PollingModel m({rng.next_unit(), exp1, 0.2 + rng.next_unit()},
                             {rng.next_unit(), exp1, 0.2 + rng.next_unit()});
        const StabilityReport a = check_stability(m);
        const StabilityReport b = check_stability(m.mirrored());
        CHECK(a.stable == b.stable);
        CHECK(a.rho1 == b.rho2);
        CHECK(a.bound1 == b.bound2);
    }
}

TEST_CASE("sampling: determinism and Monte Carlo means") {
    const auto det = ServiceDistribution::deterministic(2.0);
    Rng rng_a(42);
    CHECK(det.sample(rng_a) == 2.0);

    const auto exp1 = ServiceDistribution::exponential(1.0);
    const double first = exp1.sample(rng_a);
    exp1.sample(rng_a);
    Rng rng_c(42);
    det.sample(rng_c);
    CHECK(exp1.sample(rng_c) == first);  // same seed, same stream, same draw

    // Pareto(1.5, 1): sample mean of 1e6 draws within 3 standard errors of 3
    const auto pareto = ServiceDistribution::pareto(1.5, 1.0);
    Rng rng(123);
    const int n = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = pareto.sample(rng);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double stderr_mc = std::sqrt((sumsq / n - mean * mean) / n);
    CHECK(std::abs(mean - 3.0) < 3.0 * stderr_mc);

    // light-tailed variants: loose 4-sigma sanity on the sample mean
    for (const auto& dist : all_variants()) {
        if (dist.heavy_tailed()) continue;
        Rng r(99);
        double s = 0.0;
        const int m = 200000;
        for (int i = 0; i < m; ++i) s += dist.sample(r);
        const double sd_bound = std::sqrt(dist.moment(2)) + 1.0;
        CHECK(std::abs(s / m - dist.moment(1)) < 4.0 * sd_bound / std::sqrt(double(m)));
    }
}

TEST_CASE("validation errors") {
    CHECK_THROWS_AS(ServiceDistribution::exponential(0.0), Error);
    CHECK_THROWS_AS(ServiceDistribution::pareto(1.0, 1.0), Error);
    CHECK_THROWS_AS(ServiceDistribution::hyper_exponential({0.5, 0.4}, {1.0, 2.0}), Error);
    CHECK_THROWS_AS(ServiceDistribution::hyper_exponential({0.5, 0.5}, {1.0, -2.0}), Error);
    CHECK_THROWS_AS(ServiceDistribution::erlang(0, 1.0), Error);
    const auto exp1 = ServiceDistribution::exponential(1.0);
    CHECK_THROWS_AS(PollingModel({-0.1, exp1, 1.0}, {0.1, exp1, 1.0}), Error);
    CHECK_THROWS_AS(PollingModel({0.1, exp1, 0.0}, {0.1, exp1, 1.0}), Error);
    CHECK_NOTHROW(PollingModel({5.0, exp1, 1.0}, {5.0, exp1, 1.0}));  // unstable is fine
}
