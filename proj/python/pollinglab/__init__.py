"""Two-queue random time-limited polling toolkit.

Thin wrapper over the C++ core: marginal workload transforms and moments,
heavy-traffic/heavy-tail asymptotics, the joint-workload kernel contour,
a discrete-event simulator and the singular-perturbation expansion of the
joint queue-length distribution.
"""

from ._core import (
    ExpModel,
    PerturbationWorkspace,
    PollingError,
    PollingModel,
    ServiceDistribution,
    SymmetricModel,
    busy_period_lst,
    check_stability,
    contour_point,
    contraction_delta,
    direct_stationary,
    estimate_lst,
    heavy_tail_asymptote,
    ht_coefficients,
    ht_limit_mean,
    ht_scaled_lst,
    kernel_eval,
    marginal_workload_lst,
    mg1_workload_lst,
    mittag_leffler_limit_lst,
    one_big_jump_integral,
    simulate,
    subexp_tail_approx,
    switch_epoch_lst,
    total_variation,
    trace_contour,
    visit_end_lst,
    work_conservation_gap,
    workload_atom,
    workload_cdf,
    workload_mean,
    workload_variance,
    y_lst,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "1.0.0"
