#include "pollinglab/service_distribution.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace pollinglab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, Errc::validation,
            std::string(name) + " must be strictly positive");
}

void require_halfplane(Complex s) {
    require(s.real() >= 0.0, Errc::validation, "transform argument requires Re s >= 0");
}

} // namespace

ServiceDistribution ServiceDistribution::exponential(double rate) {
    require_positive(rate, "rate");
    ServiceDistribution d;
    d.kind_ = Kind::exponential;
    d.a_ = rate;
    return d;
}

ServiceDistribution ServiceDistribution::deterministic(double value) {
    require_positive(value, "value");
    ServiceDistribution d;
    d.kind_ = Kind::deterministic;
    d.a_ = value;
    return d;
}

ServiceDistribution ServiceDistribution::erlang(int shape, double rate) {
    require(shape >= 1, Errc::validation, "erlang shape must be a positive integer");
    require_positive(rate, "rate");
    ServiceDistribution d;
    d.kind_ = Kind::erlang;
    d.shape_ = shape;
    d.a_ = rate;
    return d;
}

ServiceDistribution ServiceDistribution::hyper_exponential(std::vector<double> probs,
                                                           std::vector<double> rates) {
    require(!probs.empty() && probs.size() == rates.size(), Errc::validation,
            "hyper-exponential needs matching, nonempty probs and rates");
    double total = 0.0;
    for (double p : probs) {
        require(p >= 0.0, Errc::validation, "hyper-exponential probabilities must be >= 0");
        total += p;
    }
    require(std::abs(total - 1.0) <= 1e-12, Errc::validation,
            "hyper-exponential probabilities must sum to 1 within 1e-12");
    for (double r : rates) require_positive(r, "rate");
    ServiceDistribution d;
    d.kind_ = Kind::hyper_exponential;
    d.probs_ = std::move(probs);
    d.rates_ = std::move(rates);
    return d;
}

ServiceDistribution ServiceDistribution::pareto(double tail_index, double scale) {
    require(std::isfinite(tail_index) && tail_index > 1.0, Errc::validation,
            "pareto tail index must exceed 1");
    require_positive(scale, "scale");
    ServiceDistribution d;
    d.kind_ = Kind::pareto;
    d.a_ = tail_index;
    d.b_ = scale;
    return d;
}

double ServiceDistribution::moment(int k) const {
    require(k >= 1 && k <= 3, Errc::validation, "moment order must be in {1,2,3}");
    switch (kind_) {
        case Kind::exponential: {
            double f = 1.0;
            for (int j = 2; j <= k; ++j) f *= j;
            return f / std::pow(a_, k);
        }
        case Kind::deterministic:
            return std::pow(a_, k);
        case Kind::erlang: {
            double num = 1.0;
            for (int j = 0; j < k; ++j) num *= shape_ + j;
            return num / std::pow(a_, k);
        }
        case Kind::hyper_exponential: {
            double f = 1.0;
            for (int j = 2; j <= k; ++j) f *= j;
            double m = 0.0;
            for (std::size_t i = 0; i < probs_.size(); ++i) m += probs_[i] * f / std::pow(rates_[i], k);
            return m;
        }
        case Kind::pareto:
            if (a_ <= static_cast<double>(k)) return kInf;
            return a_ * std::pow(b_, k) / (a_ - k);
    }
    return kInf;  // unreachable
}

Complex ServiceDistribution::lst(Complex s) const {
    require_halfplane(s);
    switch (kind_) {
        case Kind::exponential:
            return a_ / (a_ + s);
        case Kind::deterministic:
            return std::exp(-s * a_);
        case Kind::erlang:
            return std::pow(a_ / (a_ + s), shape_);
        case Kind::hyper_exponential: {
            Complex v = 0.0;
            for (std::size_t i = 0; i < probs_.size(); ++i) v += probs_[i] * rates_[i] / (rates_[i] + s);
            return v;
        }
        case Kind::pareto:
            fail(Errc::heavy_tail_no_lst, "pareto service time has no closed-form LST");
    }
    return 0.0;
}

Complex ServiceDistribution::lst_derivative(Complex s) const {
    require_halfplane(s);
    switch (kind_) {
        case Kind::exponential:
            return -a_ / ((a_ + s) * (a_ + s));
        case Kind::deterministic:
            return -a_ * std::exp(-s * a_);
        case Kind::erlang:
            return -static_cast<double>(shape_) * std::pow(a_ / (a_ + s), shape_) / (a_ + s);
        case Kind::hyper_exponential: {
            Complex v = 0.0;
            for (std::size_t i = 0; i < probs_.size(); ++i)
                v -= probs_[i] * rates_[i] / ((rates_[i] + s) * (rates_[i] + s));
            return v;
        }
        case Kind::pareto:
            fail(Errc::heavy_tail_no_lst, "pareto service time has no closed-form LST");
    }
    return 0.0;
}

double ServiceDistribution::survival(double x) const {
    require(x >= 0.0, Errc::validation, "survival requires x >= 0");
    switch (kind_) {
        case Kind::exponential:
            return std::exp(-a_ * x);
        case Kind::deterministic:
            return x < a_ ? 1.0 : 0.0;
        case Kind::erlang: {
            // Q(shape, rate*x) = sum_{j<shape} e^{-rx} (rx)^j / j!
            const double rx = a_ * x;
            double term = std::exp(-rx), acc = term;
            for (int j = 1; j < shape_; ++j) {
                term *= rx / j;
                acc += term;
            }
            return std::min(acc, 1.0);
        }
        case Kind::hyper_exponential: {
            double v = 0.0;
            for (std::size_t i = 0; i < probs_.size(); ++i) v += probs_[i] * std::exp(-rates_[i] * x);
            return v;
        }
        case Kind::pareto:
            return x < b_ ? 1.0 : std::pow(b_ / x, a_);
    }
    return 0.0;
}

double ServiceDistribution::residual_survival(double x) const {
    require(x >= 0.0, Errc::validation, "residual_survival requires x >= 0");
    switch (kind_) {
        case Kind::exponential:
            return std::exp(-a_ * x);  // memoryless
        case Kind::deterministic:
            return x < a_ ? (a_ - x) / a_ : 0.0;
        case Kind::erlang: {
            // int_x^inf Q(shape, rz) dz = (1/r) sum_{j=1}^{shape} Q(j, rx)
            const double rx = a_ * x;
            double term = std::exp(-rx), partial = term, acc = 0.0;
            for (int j = 1; j <= shape_; ++j) {
                acc += partial;  // partial = Q(j, rx)
                term *= rx / j;
                partial += term;
            }
            return std::min(acc / shape_, 1.0);
        }
        case Kind::hyper_exponential: {
            double num = 0.0;
            for (std::size_t i = 0; i < probs_.size(); ++i)
                num += probs_[i] * std::exp(-rates_[i] * x) / rates_[i];
            return num / mean();
        }
        case Kind::pareto: {
            const double nu = a_, xm = b_;
            const double tail_from = std::max(x, xm);
            double integral = std::pow(xm, nu) * std::pow(tail_from, 1.0 - nu) / (nu - 1.0);
            if (x < xm) integral += xm - x;
            return std::min(integral / mean(), 1.0);
        }
    }
    return 0.0;
}

double ServiceDistribution::sample(Rng& rng) const {
    switch (kind_) {
        case Kind::exponential:
            return rng.exponential(a_);
        case Kind::deterministic:
            return a_;
        case Kind::erlang: {
            double acc = 0.0;
            for (int j = 0; j < shape_; ++j) acc += rng.exponential(a_);
            return acc;
        }
        case Kind::hyper_exponential: {
            const double u = rng.next_unit();
            double cum = 0.0;
            std::size_t pick = probs_.size() - 1;
            for (std::size_t i = 0; i < probs_.size(); ++i) {
                cum += probs_[i];
                if (u <= cum) {
                    pick = i;
                    break;
                }
            }
            return rng.exponential(rates_[pick]);
        }
        case Kind::pareto:
            return b_ * std::pow(rng.next_unit(), -1.0 / a_);
    }
    return 0.0;
}

double ServiceDistribution::tail_index() const {
    require(kind_ == Kind::pareto, Errc::validation, "tail_index defined for pareto only");
    return a_;
}

double ServiceDistribution::pareto_scale() const {
    require(kind_ == Kind::pareto, Errc::validation, "pareto_scale defined for pareto only");
    return b_;
}

double ServiceDistribution::tail_slowly_varying_constant() const {
    require(kind_ == Kind::pareto, Errc::validation,
            "tail constant defined for pareto only");
    return std::pow(b_, a_);
}

std::string ServiceDistribution::describe() const {
    std::ostringstream out;
    switch (kind_) {
        case Kind::exponential:
            out << "Exponential(rate=" << a_ << ")";
            break;
        case Kind::deterministic:
            out << "Deterministic(" << a_ << ")";
            break;
        case Kind::erlang:
            out << "Erlang(shape=" << shape_ << ", rate=" << a_ << ")";
            break;
        case Kind::hyper_exponential: {
            out << "HyperExponential(";
            for (std::size_t i = 0; i < probs_.size(); ++i)
                out << (i ? ", " : "") << probs_[i] << "@" << rates_[i];
            out << ")";
            break;
        }
        case Kind::pareto:
            out << "Pareto(nu=" << a_ << ", scale=" << b_ << ")";
            break;
    }
    return out.str();
}

bool ServiceDistribution::operator==(const ServiceDistribution& other) const {
    return kind_ == other.kind_ && a_ == other.a_ && b_ == other.b_ &&
           shape_ == other.shape_ && probs_ == other.probs_ && rates_ == other.rates_;
}

} // namespace pollinglab
