#pragma once

#include "pollinglab/service_distribution.hpp"

namespace pollinglab {

struct QueueParams {
    double lambda;                // Poisson arrival rate, >= 0
    ServiceDistribution service;  // service-time law B
    double c;                     // timer rate: the server resides here Exp(c)
};

struct StabilityReport {
    bool stable;
    double rho1, rho2;
    double bound1, bound2;  // c2/(c1+c2) and c1/(c1+c2)
};

/// Two-queue polling model with exponential residing times, no switch-over
/// and preemptive-resume service. Construction only validates positivity;
/// stability is a separate query.
class PollingModel {
public:
    PollingModel(QueueParams q1, QueueParams q2);

    const QueueParams& q1() const noexcept { return q1_; }
    const QueueParams& q2() const noexcept { return q2_; }
    const QueueParams& queue(int index) const;  // index in {1,2}

    double rho(int index) const;  // lambda_i E(B_i); may be +inf

    PollingModel mirrored() const { return PollingModel(q2_, q1_); }

private:
    QueueParams q1_, q2_;
};

StabilityReport check_stability(const PollingModel& model);

// throws Errc::unstable when the stability condition fails
void require_stable(const PollingModel& model);

} // namespace pollinglab
