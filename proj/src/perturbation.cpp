#include "pollinglab/perturbation.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <deque>

namespace pollinglab::perturb {

namespace {

using Triplet = Eigen::Triplet<double>;

void require_positive(double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, Errc::validation,
            std::string(name) + " must be strictly positive");
}

// solve x A = b subject to x 1 = fixed total mass, exploiting that one
// equation of the singular system is redundant: the column `pivot` of A^T is
// replaced by the all-ones constraint row
class ConstrainedTransposeSolver {
public:
    ConstrainedTransposeSolver(const SparseMat& a, int pivot) : pivot_(pivot) {
        SparseMat at = SparseMat(a.transpose());
        std::vector<Triplet> triplets;
        triplets.reserve(static_cast<std::size_t>(at.nonZeros()) + at.rows());
        for (int col = 0; col < at.outerSize(); ++col)
            for (SparseMat::InnerIterator it(at, col); it; ++it)
                if (it.row() != pivot_) triplets.emplace_back(it.row(), it.col(), it.value());
        for (int col = 0; col < at.cols(); ++col) triplets.emplace_back(pivot_, col, 1.0);
        SparseMat modified(at.rows(), at.cols());
        modified.setFromTriplets(triplets.begin(), triplets.end());
        solver_.compute(modified);
        require(solver_.info() == Eigen::Success, Errc::singular_system,
                "stationary/deviation system could not be factorized");
    }

    // rhs of the original equations; `mass` is the imposed total of x
    RowVector solve(Eigen::VectorXd rhs, double mass) const {
        rhs(pivot_) = mass;
        const Eigen::VectorXd x = solver_.solve(rhs);
        require(solver_.info() == Eigen::Success, Errc::singular_system,
                "stationary/deviation solve failed");
        return x.transpose();
    }

private:
    int pivot_;
    Eigen::SparseLU<SparseMat> solver_;
};

} // namespace

void ExpModel::validate() const {
    require_positive(lambda1, "lambda1");
    require_positive(lambda2, "lambda2");
    require_positive(mu1, "mu1");
    require_positive(mu2, "mu2");
    require_positive(c1, "c1");
    require_positive(c2, "c2");
}

ExpModel ExpModel::from_polling(const PollingModel& model) {
    const auto& s1 = model.q1().service;
    const auto& s2 = model.q2().service;
    require(s1.kind() == ServiceDistribution::Kind::exponential &&
                s2.kind() == ServiceDistribution::Kind::exponential,
            Errc::non_exponential_service,
            "perturbation analysis requires exponential services at both queues");
    ExpModel m{model.q1().lambda, model.q2().lambda, s1.param_a(), s2.param_a(),
               model.q1().c,      model.q2().c};
    m.validate();
    return m;
}

PollingModel ExpModel::as_polling_model(double epsilon) const {
    return PollingModel(
        {epsilon * lambda1, ServiceDistribution::exponential(epsilon * mu1), c1},
        {epsilon * lambda2, ServiceDistribution::exponential(epsilon * mu2), c2});
}

void TruncationSpec::validate() const {
    require(n1_max >= 1 && n2_max >= 1, Errc::validation,
            "truncation needs n1_max, n2_max >= 1");
}

UniformizationReport check_uniformization(const ExpModel& model) {
    model.validate();
    UniformizationReport r{};
    r.slack1 = 1.0 - (model.lambda1 + model.lambda2 + model.mu1 + model.c1);
    r.slack2 = 1.0 - (model.lambda1 + model.lambda2 + model.mu2 + model.c2);
    r.ok = r.slack1 >= 0.0 && r.slack2 >= 0.0;
    return r;
}

SparseMat build_g0(const TruncationSpec& trunc, const ExpModel& model) {
    trunc.validate();
    model.validate();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(4 * trunc.classes()));
    for (int n1 = 0; n1 <= trunc.n1_max; ++n1)
        for (int n2 = 0; n2 <= trunc.n2_max; ++n2) {
            const int s1 = trunc.state_index(n1, n2, 1);
            const int s2 = trunc.state_index(n1, n2, 2);
            t.emplace_back(s1, s1, -model.c1);
            t.emplace_back(s1, s2, model.c1);
            t.emplace_back(s2, s1, model.c2);
            t.emplace_back(s2, s2, -model.c2);
        }
    SparseMat g0(trunc.states(), trunc.states());
    g0.setFromTriplets(t.begin(), t.end());
    return g0;
}

SparseMat build_g1(const TruncationSpec& trunc, const ExpModel& model) {
    trunc.validate();
    model.validate();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(4 * trunc.states()));
    for (int n1 = 0; n1 <= trunc.n1_max; ++n1)
        for (int n2 = 0; n2 <= trunc.n2_max; ++n2)
            for (int k = 1; k <= 2; ++k) {
                const int row = trunc.state_index(n1, n2, k);
                double outflow = 0.0;
                if (n1 < trunc.n1_max) {
                    t.emplace_back(row, trunc.state_index(n1 + 1, n2, k), model.lambda1);
                    outflow += model.lambda1;
                }
                if (n2 < trunc.n2_max) {
                    t.emplace_back(row, trunc.state_index(n1, n2 + 1, k), model.lambda2);
                    outflow += model.lambda2;
                }
                if (k == 1 && n1 >= 1) {
                    t.emplace_back(row, trunc.state_index(n1 - 1, n2, k), model.mu1);
                    outflow += model.mu1;
                }
                if (k == 2 && n2 >= 1) {
                    t.emplace_back(row, trunc.state_index(n1, n2 - 1, k), model.mu2);
                    outflow += model.mu2;
                }
                t.emplace_back(row, row, -outflow);
            }
    SparseMat g1(trunc.states(), trunc.states());
    g1.setFromTriplets(t.begin(), t.end());
    return g1;
}

SparseMat build_generator(const TruncationSpec& trunc, const ExpModel& model,
                          double epsilon) {
    require(epsilon >= 0.0, Errc::validation, "epsilon must be >= 0");
    return build_g0(trunc, model) + epsilon * build_g1(trunc, model);
}

SparseMat aggregated_generator(const TruncationSpec& trunc, const ExpModel& model) {
    trunc.validate();
    model.validate();
    const double mu1_eff = model.mu1 * model.availability1();
    const double mu2_eff = model.mu2 * model.availability2();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(5 * trunc.classes()));
    for (int n1 = 0; n1 <= trunc.n1_max; ++n1)
        for (int n2 = 0; n2 <= trunc.n2_max; ++n2) {
            const int row = trunc.class_index(n1, n2);
            double outflow = 0.0;
            if (n1 < trunc.n1_max) {
                t.emplace_back(row, trunc.class_index(n1 + 1, n2), model.lambda1);
                outflow += model.lambda1;
            }
            if (n2 < trunc.n2_max) {
                t.emplace_back(row, trunc.class_index(n1, n2 + 1), model.lambda2);
                outflow += model.lambda2;
            }
            if (n1 >= 1) {
                t.emplace_back(row, trunc.class_index(n1 - 1, n2), mu1_eff);
                outflow += mu1_eff;
            }
            if (n2 >= 1) {
                t.emplace_back(row, trunc.class_index(n1, n2 - 1), mu2_eff);
                outflow += mu2_eff;
            }
            t.emplace_back(row, row, -outflow);
        }
    SparseMat gamma(trunc.classes(), trunc.classes());
    gamma.setFromTriplets(t.begin(), t.end());
    return gamma;
}

RowVector aggregated_stationary(const TruncationSpec& trunc, const ExpModel& model) {
    trunc.validate();
    model.validate();
    const double r1 = model.rho_tilde1();
    const double r2 = model.rho_tilde2();
    require(r1 < 1.0 && r2 < 1.0, Errc::aggregated_unstable,
            "aggregated chain requires rho~_1 < 1 and rho~_2 < 1");
    RowVector pi(trunc.classes());
    for (int n1 = 0; n1 <= trunc.n1_max; ++n1)
        for (int n2 = 0; n2 <= trunc.n2_max; ++n2)
            pi(trunc.class_index(n1, n2)) = std::pow(r1, n1) * std::pow(r2, n2);
    pi /= pi.sum();
    return pi;
}

std::pair<SparseMat, SparseMat> build_vw(const TruncationSpec& trunc,
                                         const ExpModel& model) {
    trunc.validate();
    model.validate();
    const double a1 = model.availability1();
    const double a2 = model.availability2();
    std::vector<Triplet> tv, tw;
    tv.reserve(static_cast<std::size_t>(2 * trunc.classes()));
    tw.reserve(static_cast<std::size_t>(2 * trunc.classes()));
    for (int n1 = 0; n1 <= trunc.n1_max; ++n1)
        for (int n2 = 0; n2 <= trunc.n2_max; ++n2) {
            const int cls = trunc.class_index(n1, n2);
            tv.emplace_back(cls, trunc.state_index(n1, n2, 1), a1);
            tv.emplace_back(cls, trunc.state_index(n1, n2, 2), a2);
            tw.emplace_back(trunc.state_index(n1, n2, 1), cls, 1.0);
            tw.emplace_back(trunc.state_index(n1, n2, 2), cls, 1.0);
        }
    SparseMat v(trunc.classes(), trunc.states());
    SparseMat w(trunc.states(), trunc.classes());
    v.setFromTriplets(tv.begin(), tv.end());
    w.setFromTriplets(tw.begin(), tw.end());
    return {v, w};
}

SparseMat deviation_h(const TruncationSpec& trunc, const ExpModel& model) {
    const double csum = model.c1 + model.c2;
    return SparseMat((-1.0 / (csum * csum)) * build_g0(trunc, model));
}

DenseMat deviation_phi(const TruncationSpec& trunc, const ExpModel& model,
                       PhiResiduals* residuals) {
    const SparseMat gamma = aggregated_generator(trunc, model);
    const RowVector pi_bar = aggregated_stationary(trunc, model);
    const int n = trunc.classes();

    const ConstrainedTransposeSolver solver(gamma, trunc.class_index(0, 0));
    DenseMat phi(n, n);
    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r) {
        // (gamma - I) row r, with gamma = 1 pi_bar
        rhs = pi_bar.transpose();
        rhs(r) -= 1.0;
        phi.row(r) = solver.solve(rhs, 0.0);
    }

    if (residuals != nullptr) {
        PhiResiduals res;
        const DenseMat lhs = phi * gamma;   // should equal 1 pi_bar - I
        const DenseMat lhs2 = gamma * phi;
        for (int r = 0; r < n; ++r) {
            double err = 0.0, err2 = 0.0;
            for (int c = 0; c < n; ++c) {
                const double target = pi_bar(c) - (r == c ? 1.0 : 0.0);
                err = std::max(err, std::abs(lhs(r, c) - target));
                err2 = std::max(err2, std::abs(lhs2(r, c) - target));
            }
            res.phi_gamma = std::max(res.phi_gamma, err);
            const int n1 = r / (trunc.n2_max + 1), n2 = r % (trunc.n2_max + 1);
            if (trunc.interior_class(n1, n2))
                res.gamma_phi = std::max(res.gamma_phi, err2);
        }
        res.row_sums = phi.rowwise().sum().cwiseAbs().maxCoeff();
        res.pibar_phi = (pi_bar * phi).cwiseAbs().maxCoeff();
        *residuals = res;
    }
    return phi;
}

DenseMat build_u(const SparseMat& g1, const SparseMat& h, const SparseMat& w,
                 const DenseMat& phi, const SparseMat& v) {
    require(g1.rows() == h.rows() && h.cols() == w.rows() && w.cols() == phi.rows() &&
                phi.cols() == v.rows() && v.cols() == g1.rows(),
            Errc::dimension_mismatch, "U factor dimensions do not line up");
    const SparseMat g1w = g1 * w;
    DenseMat inner = DenseMat(g1w) * phi * DenseMat(v);
    inner += DenseMat::Identity(inner.rows(), inner.cols());
    return DenseMat(SparseMat(g1 * h)) * inner;
}

double total_variation(const RowVector& p, const RowVector& q) {
    require(p.size() == q.size(), Errc::dimension_mismatch,
            "total variation needs equal-length vectors");
    return 0.5 * (p - q).cwiseAbs().sum();
}

StationaryDistribution direct_stationary(const TruncationSpec& trunc,
                                         const ExpModel& model, double epsilon) {
    const SparseMat g = build_generator(trunc, model, epsilon);
    const ConstrainedTransposeSolver solver(g, 0);
    RowVector pi = solver.solve(Eigen::VectorXd::Zero(trunc.states()), 1.0);

    StationaryDistribution out;
    out.epsilon = epsilon;
    out.method = "direct";
    out.residual = (pi * g).cwiseAbs().maxCoeff();
    out.renormalization = std::abs(pi.sum() - 1.0);
    pi /= pi.sum();
    out.probabilities = std::move(pi);
    return out;
}

Workspace::Workspace(const ExpModel& model, const TruncationSpec& trunc)
    : model_(model), trunc_(trunc) {
    trunc_.validate();
    model_.validate();
    g0_ = build_g0(trunc_, model_);
    g1_ = build_g1(trunc_, model_);
    gamma_ = aggregated_generator(trunc_, model_);
    h_ = deviation_h(trunc_, model_);
    std::tie(v_, w_) = build_vw(trunc_, model_);
    pi_bar_ = aggregated_stationary(trunc_, model_);
    phi_ = deviation_phi(trunc_, model_, &phi_residuals_);
    u_ = build_u(g1_, h_, w_, phi_, v_);
    pi0_ = pi_bar_ * v_;
}

StationaryDistribution Workspace::series_stationary(double epsilon, int terms) const {
    require(epsilon >= 0.0, Errc::validation, "epsilon must be >= 0");
    require(terms >= 0, Errc::validation, "series needs terms >= 0");

    RowVector term = pi0_;  // eps^0 pi^(0)
    RowVector sum = term;
    std::deque<double> recent_norms{term.cwiseAbs().sum()};
    for (int m = 1; m <= terms; ++m) {
        term = epsilon * (term * u_);
        sum += term;
        recent_norms.push_back(term.cwiseAbs().sum());
        if (recent_norms.size() > 5) recent_norms.pop_front();
        if (recent_norms.size() == 5) {
            bool growing = true;
            for (std::size_t i = 1; i < recent_norms.size(); ++i)
                growing = growing && recent_norms[i] > recent_norms[i - 1];
            if (growing)
                fail(Errc::series_diverging,
                     "series term norms grew over the last 5 terms at epsilon = " +
                         std::to_string(epsilon));
        }
    }

    StationaryDistribution out;
    out.epsilon = epsilon;
    out.method = "series-" + std::to_string(terms);
    out.renormalization = std::abs(sum.sum() - 1.0);
    sum /= sum.sum();
    out.probabilities = std::move(sum);
    return out;
}

StationaryDistribution Workspace::resolvent_stationary(double epsilon) const {
    require(epsilon >= 0.0, Errc::validation, "epsilon must be >= 0");
    const int n = trunc_.states();
    const DenseMat system = DenseMat::Identity(n, n) - epsilon * u_;
    const Eigen::PartialPivLU<DenseMat> lu(system.transpose());
    RowVector pi = lu.solve(pi0_.transpose()).transpose();
    const double residual = (pi * system - pi0_).cwiseAbs().maxCoeff();
    require(std::isfinite(residual) && residual < 1e-6, Errc::singular_system,
            "I - eps U is numerically singular at this truncation");

    StationaryDistribution out;
    out.epsilon = epsilon;
    out.method = "resolvent";
    out.renormalization = std::abs(pi.sum() - 1.0);
    pi /= pi.sum();
    out.probabilities = std::move(pi);
    return out;
}

ServerCertificate verify_lyapunov_unperturbed(const ExpModel& model) {
    model.validate();
    ServerCertificate cert;
    cert.delta = 1.0 - model.c1 * model.c2 / (model.c1 + model.c2);
    cert.b = 1.0 - cert.delta + model.c1 * model.c1 / model.c2;
    cert.u = {1.0, 1.0 + model.c1 / model.c2};
    cert.strongly_aperiodic = model.c1 < 1.0 && model.c2 < 1.0;

    // rows of (I + C) u against delta u + b e1
    const double lhs1 = (1.0 - model.c1) * cert.u[0] + model.c1 * cert.u[1];
    const double lhs2 = model.c2 * cert.u[0] + (1.0 - model.c2) * cert.u[1];
    cert.row_slack = {cert.delta * cert.u[0] + cert.b - lhs1,
                      cert.delta * cert.u[1] - lhs2};
    cert.pass = cert.strongly_aperiodic && cert.delta > 0.0 && cert.delta < 1.0 &&
                cert.b > 0.0 && std::isfinite(cert.b) &&
                cert.row_slack[0] >= -1e-12 && cert.row_slack[1] >= -1e-12;
    return cert;
}

AggregatedCertificate verify_lyapunov_aggregated(const TruncationSpec& trunc,
                                                 const ExpModel& model) {
    trunc.validate();
    model.validate();
    const double mu1_eff = model.mu1 * model.availability1();
    const double mu2_eff = model.mu2 * model.availability2();
    const double r1 = std::sqrt(mu1_eff / model.lambda1);
    const double r2 = std::sqrt(mu2_eff / model.lambda2);

    AggregatedCertificate cert;
    const double d1 = std::sqrt(model.lambda1) - std::sqrt(mu1_eff);
    const double d2 = std::sqrt(model.lambda2) - std::sqrt(mu2_eff);
    cert.delta_bar = 1.0 - d1 * d1 - d2 * d2 +
                     std::max(mu2_eff * (1.0 - 1.0 / r2), mu1_eff * (1.0 - 1.0 / r1));
    cert.b_bar = 1.0 - cert.delta_bar + model.lambda1 * (r1 - 1.0) +
                 model.lambda2 * (r2 - 1.0);

    const auto u_bar = [&](int n1, int n2) {
        return std::pow(r1, n1) * std::pow(r2, n2);
    };
    for (int n1 = 0; n1 <= trunc.n1_max; ++n1)
        for (int n2 = 0; n2 <= trunc.n2_max; ++n2) {
            const double u = u_bar(n1, n2);
            double lhs = u;  // I part
            if (n1 < trunc.n1_max) lhs += model.lambda1 * (u_bar(n1 + 1, n2) - u);
            if (n2 < trunc.n2_max) lhs += model.lambda2 * (u_bar(n1, n2 + 1) - u);
            if (n1 >= 1) lhs += mu1_eff * (u_bar(n1 - 1, n2) - u);
            if (n2 >= 1) lhs += mu2_eff * (u_bar(n1, n2 - 1) - u);
            double rhs = cert.delta_bar * u;
            if (n1 == 0 && n2 == 0) rhs += cert.b_bar;
            const double violation = (lhs - rhs) / u;  // weighted-space slack
            if (trunc.interior_class(n1, n2))
                cert.max_interior_violation = std::max(cert.max_interior_violation, violation);
            else
                cert.max_boundary_violation = std::max(cert.max_boundary_violation, violation);
        }
    cert.pass = cert.delta_bar > 0.0 && cert.delta_bar < 1.0 && cert.b_bar > 0.0 &&
                std::isfinite(cert.b_bar) && cert.max_interior_violation <= 1e-12;
    return cert;
}

G1NormReport verify_g1_norm_bound(const TruncationSpec& trunc, const ExpModel& model) {
    trunc.validate();
    model.validate();
    const double mu1_eff = model.mu1 * model.availability1();
    const double mu2_eff = model.mu2 * model.availability2();
    const double r1 = std::sqrt(mu1_eff / model.lambda1);
    const double r2 = std::sqrt(mu2_eff / model.lambda2);

    G1NormReport report;
    report.g1 = (model.mu1 + mu1_eff + mu2_eff) / r1;
    report.g2 = (model.mu2 + mu1_eff + mu2_eff) / r2;

    for (int n1 = 0; n1 <= trunc.n1_max; ++n1)
        for (int n2 = 0; n2 <= trunc.n2_max; ++n2)
            for (int k = 1; k <= 2; ++k) {
                double offdiag = 0.0, diag = 0.0;
                if (n1 < trunc.n1_max) offdiag += model.lambda1 * r1;
                if (n2 < trunc.n2_max) offdiag += model.lambda2 * r2;
                if (k == 1 && n1 >= 1) {
                    offdiag += model.mu1 / r1;
                    diag += model.mu1;
                }
                if (k == 2 && n2 >= 1) {
                    offdiag += model.mu2 / r2;
                    diag += model.mu2;
                }
                if (n1 < trunc.n1_max) diag += model.lambda1;
                if (n2 < trunc.n2_max) diag += model.lambda2;
                report.sup_offdiag = std::max(report.sup_offdiag, offdiag);
                report.sup_with_diagonal =
                    std::max(report.sup_with_diagonal, offdiag + diag);
            }
    report.within_bound = report.sup_offdiag <= std::max(report.g1, report.g2) + 1e-12;
    return report;
}

} // namespace pollinglab::perturb
