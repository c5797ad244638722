#include "pollinglab/model.hpp"

#include <cmath>

namespace pollinglab {

namespace {

void validate_queue(const QueueParams& q, const char* tag) {
    require(std::isfinite(q.lambda) && q.lambda >= 0.0, Errc::validation,
            std::string("lambda of ") + tag + " must be >= 0");
    require(std::isfinite(q.c) && q.c > 0.0, Errc::validation,
            std::string("timer rate c of ") + tag + " must be > 0");
}

} // namespace

PollingModel::PollingModel(QueueParams q1, QueueParams q2)
    : q1_(std::move(q1)), q2_(std::move(q2)) {
    validate_queue(q1_, "queue 1");
    validate_queue(q2_, "queue 2");
}

const QueueParams& PollingModel::queue(int index) const {
    require(index == 1 || index == 2, Errc::validation, "queue index must be 1 or 2");
    return index == 1 ? q1_ : q2_;
}

double PollingModel::rho(int index) const {
    const QueueParams& q = queue(index);
    return q.lambda * q.service.mean();
}

StabilityReport check_stability(const PollingModel& model) {
    StabilityReport report{};
    report.rho1 = model.rho(1);
    report.rho2 = model.rho(2);
    const double csum = model.q1().c + model.q2().c;
    report.bound1 = model.q2().c / csum;
    report.bound2 = model.q1().c / csum;
    report.stable = report.rho1 < report.bound1 && report.rho2 < report.bound2;
    return report;
}

void require_stable(const PollingModel& model) {
    const StabilityReport r = check_stability(model);
    if (!r.stable)
        fail(Errc::unstable, "model is unstable: rho1=" + std::to_string(r.rho1) +
                                 " (bound " + std::to_string(r.bound1) +
                                 "), rho2=" + std::to_string(r.rho2) + " (bound " +
                                 std::to_string(r.bound2) + ")");
}

} // namespace pollinglab
