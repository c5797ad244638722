#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <utility>
#include <vector>

#include "pollinglab/model.hpp"

namespace pollinglab::perturb {

using SparseMat = Eigen::SparseMatrix<double>;
using DenseMat = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// Exponential-service model of the perturbed joint queue-length chain;
/// arrival and service rates are scaled by epsilon, timers are not.
struct ExpModel {
    double lambda1, lambda2;
    double mu1, mu2;  // service rates, E B_i = 1/mu_i
    double c1, c2;

    void validate() const;
    static ExpModel from_polling(const PollingModel& model);
    PollingModel as_polling_model(double epsilon = 1.0) const;

    double availability1() const { return c2 / (c1 + c2); }  // server fraction at queue 1
    double availability2() const { return c1 / (c1 + c2); }
    // aggregated M/M/1 loads rho~_i = lambda_i / (mu_i * availability_i)
    double rho_tilde1() const { return lambda1 / (mu1 * availability1()); }
    double rho_tilde2() const { return lambda2 / (mu2 * availability2()); }
};

/// Truncated state space {0..n1_max} x {0..n2_max} x {1,2} in row-major
/// order: n1 outer, n2 middle, server position k inner. Truncation closes
/// rows by deleting outbound arrival transitions at the boundary together
/// with their diagonal contribution, so every generator stays conservative.
struct TruncationSpec {
    int n1_max, n2_max;

    void validate() const;
    int classes() const { return (n1_max + 1) * (n2_max + 1); }
    int states() const { return 2 * classes(); }
    int class_index(int n1, int n2) const { return n1 * (n2_max + 1) + n2; }
    int state_index(int n1, int n2, int k) const {
        return 2 * class_index(n1, n2) + (k - 1);
    }
    bool interior_class(int n1, int n2) const {
        return n1 < n1_max && n2 < n2_max;
    }
};

struct UniformizationReport {
    bool ok;
    double slack1, slack2;  // 1 - (lambda1+lambda2+mu_i+c_i)
};
UniformizationReport check_uniformization(const ExpModel& model);

/// Server-switching part: block-diagonal with C = [[-c1, c1], [c2, -c2]].
SparseMat build_g0(const TruncationSpec& trunc, const ExpModel& model);

/// Arrival/service part (scaled by epsilon in the full generator).
SparseMat build_g1(const TruncationSpec& trunc, const ExpModel& model);

/// G(eps) = G0 + eps G1 on the truncated space.
SparseMat build_generator(const TruncationSpec& trunc, const ExpModel& model,
                          double epsilon);

/// Generator of the aggregated chain (two M/M/1 queues with
/// availability-scaled service rates) on the truncated class space.
SparseMat aggregated_generator(const TruncationSpec& trunc, const ExpModel& model);

/// Product-form stationary measure of the aggregated chain, renormalized to
/// the truncation. Throws Errc::aggregated_unstable when rho~_i >= 1.
RowVector aggregated_stationary(const TruncationSpec& trunc, const ExpModel& model);

/// V (classes x states): each row is the timer-equilibrium distribution of
/// its ergodic class; W (states x classes): 0/1 class indicators. V W = I.
std::pair<SparseMat, SparseMat> build_vw(const TruncationSpec& trunc,
                                         const ExpModel& model);

/// Deviation matrix of the unperturbed chain: -G0 / (c1+c2)^2.
SparseMat deviation_h(const TruncationSpec& trunc, const ExpModel& model);

struct PhiResiduals {
    double phi_gamma = 0.0;    // ||Phi Gamma - (gamma - I)||_inf, all rows
    double gamma_phi = 0.0;    // ||Gamma Phi - (gamma - I)||_inf, interior rows
    double row_sums = 0.0;     // ||Phi 1||_inf
    double pibar_phi = 0.0;    // ||pi_bar Phi||_inf
};

/// Deviation matrix of the aggregated chain from the defining identities
/// Phi Gamma = gamma - I with the row constraint Phi 1 = 0, solved row-wise
/// with one factorization. Throws Errc::singular_system when the truncated
/// system cannot be factorized (truncation too small).
DenseMat deviation_phi(const TruncationSpec& trunc, const ExpModel& model,
                       PhiResiduals* residuals = nullptr);

/// U = G1 H (I + G1 W Phi V).
DenseMat build_u(const SparseMat& g1, const SparseMat& h, const SparseMat& w,
                 const DenseMat& phi, const SparseMat& v);

struct StationaryDistribution {
    RowVector probabilities;      // over the truncated states, sums to 1
    double epsilon = 0.0;
    std::string method;           // "series-M", "resolvent" or "direct"
    double renormalization = 0.0; // |raw sum - 1| before renormalizing
    double residual = 0.0;        // ||pi G(eps)||_inf where applicable
};

double total_variation(const RowVector& p, const RowVector& q);

/// Oracle: solve pi G(eps) = 0, pi 1 = 1 on the truncated generator.
StationaryDistribution direct_stationary(const TruncationSpec& trunc,
                                         const ExpModel& model, double epsilon);

/// Precomputed matrices for the perturbation-series stationary measure.
class Workspace {
public:
    Workspace(const ExpModel& model, const TruncationSpec& trunc);

    const ExpModel& model() const { return model_; }
    const TruncationSpec& trunc() const { return trunc_; }
    const SparseMat& g0() const { return g0_; }
    const SparseMat& g1() const { return g1_; }
    const SparseMat& gamma() const { return gamma_; }
    const SparseMat& h() const { return h_; }
    const SparseMat& v() const { return v_; }
    const SparseMat& w() const { return w_; }
    const DenseMat& phi() const { return phi_; }
    const DenseMat& u() const { return u_; }
    const RowVector& pi_bar() const { return pi_bar_; }   // classes
    const RowVector& pi0() const { return pi0_; }         // pi_bar V, states
    const PhiResiduals& phi_residuals() const { return phi_residuals_; }

    /// Partial sum of pi(eps) = sum_m eps^m pi_bar V U^m through `terms`,
    /// renormalized to total mass 1. Throws Errc::series_diverging when the
    /// term norms grow over the last five terms.
    StationaryDistribution series_stationary(double epsilon, int terms) const;

    /// Updating formula pi(eps) = pi0 (I - eps U)^{-1}.
    StationaryDistribution resolvent_stationary(double epsilon) const;

private:
    ExpModel model_;
    TruncationSpec trunc_;
    SparseMat g0_, g1_, gamma_, h_, v_, w_;
    DenseMat phi_, u_;
    RowVector pi_bar_, pi0_;
    PhiResiduals phi_residuals_;
};

struct ServerCertificate {
    bool pass = false;
    double delta = 0.0, b = 0.0;
    std::array<double, 2> u{};
    std::array<double, 2> row_slack{};  // delta u + b e1 - (I+C) u, >= 0 when pass
    bool strongly_aperiodic = false;
};

/// Lyapunov certificate of the unperturbed (server-position) chain with
/// u = (1, 1+c1/c2), delta = 1 - c1 c2/(c1+c2), b = 1 - delta + c1^2/c2;
/// both rows close with equality.
ServerCertificate verify_lyapunov_unperturbed(const ExpModel& model);

struct AggregatedCertificate {
    bool pass = false;
    double delta_bar = 0.0, b_bar = 0.0;
    // violations are normalized by the Lyapunov weight of the state
    double max_interior_violation = 0.0;
    double max_boundary_violation = 0.0;  // truncation artifacts only
};

/// Lyapunov certificate of the aggregated chain with the geometric weight
/// u_bar(n1,n2) = r1^{n1} r2^{n2}, r_i = sqrt(mu_i availability_i/lambda_i).
AggregatedCertificate verify_lyapunov_aggregated(const TruncationSpec& trunc,
                                                 const ExpModel& model);

struct G1NormReport {
    double sup_offdiag = 0.0;        // weighted off-diagonal row sums of |G1|
    double sup_with_diagonal = 0.0;  // diagnostic: diagonal included
    double g1 = 0.0, g2 = 0.0;       // stated bounds
    bool within_bound = false;       // sup_offdiag <= max(g1, g2) + 1e-12
};

/// Weighted-norm bound on the perturbation matrix in the tilde-u norm
/// u~(n1,n2,k) = u_bar(n1,n2) u_k. The stated constants bound the
/// off-diagonal jump rates; the diagonal-inclusive value is reported as a
/// diagnostic alongside.
G1NormReport verify_g1_norm_bound(const TruncationSpec& trunc, const ExpModel& model);

} // namespace pollinglab::perturb
