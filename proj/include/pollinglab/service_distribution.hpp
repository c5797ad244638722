#pragma once

#include <complex>
#include <string>
#include <vector>

#include "pollinglab/errors.hpp"
#include "pollinglab/rng.hpp"

namespace pollinglab {

using Complex = std::complex<double>;

/// Service-time law B: closed-form moments, tail, transform and a sampler.
///
/// Pareto is the heavy-tailed member of the family: its LST has no closed
/// form (lst() throws) and moments of order >= nu are infinite. Its tail is
/// regularly varying with the constant slowly-varying factor L = scale^nu.
class ServiceDistribution {
public:
    enum class Kind { exponential, deterministic, erlang, hyper_exponential, pareto };

    static ServiceDistribution exponential(double rate);
    static ServiceDistribution deterministic(double value);
    static ServiceDistribution erlang(int shape, double rate);
    static ServiceDistribution hyper_exponential(std::vector<double> probs,
                                                 std::vector<double> rates);
    static ServiceDistribution pareto(double tail_index, double scale);

    Kind kind() const noexcept { return kind_; }
    bool heavy_tailed() const noexcept { return kind_ == Kind::pareto; }

    // k-th raw moment, k in {1,2,3}; +infinity for Pareto with nu <= k
    double moment(int k) const;
    double mean() const { return moment(1); }

    // E exp(-sB), Re s >= 0; throws Errc::heavy_tail_no_lst for Pareto
    Complex lst(Complex s) const;
    // d/ds of lst, same domain
    Complex lst_derivative(Complex s) const;

    // P(B > x), x >= 0
    double survival(double x) const;
    // residual tail: int_x^inf P(B > z) dz / E B
    double residual_survival(double x) const;

    double sample(Rng& rng) const;

    // Pareto accessors (throw Errc::validation on other kinds)
    double tail_index() const;
    double pareto_scale() const;
    // L = scale^nu such that P(B > x) = L x^{-nu} for x >= scale
    double tail_slowly_varying_constant() const;

    std::string describe() const;

    bool operator==(const ServiceDistribution& other) const;

    // parameter accessors used by serialization
    double param_a() const noexcept { return a_; }
    double param_b() const noexcept { return b_; }
    int shape() const noexcept { return shape_; }
    const std::vector<double>& probs() const noexcept { return probs_; }
    const std::vector<double>& rates() const noexcept { return rates_; }

private:
    ServiceDistribution() = default;

    Kind kind_ = Kind::exponential;
    double a_ = 0.0;   // exponential: rate; deterministic: value; erlang: rate;
                       // pareto: tail index nu
    double b_ = 0.0;   // pareto: scale x_m
    int shape_ = 0;    // erlang only
    std::vector<double> probs_, rates_;  // hyper-exponential branches
};

} // namespace pollinglab
