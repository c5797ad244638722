#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pollinglab/asymptotics.hpp"
#include "pollinglab/kernel.hpp"
#include "pollinglab/perturbation.hpp"
#include "pollinglab/simulator.hpp"
#include "pollinglab/transforms.hpp"

namespace py = pybind11;
using namespace pollinglab;

namespace {

sim::SimConfig make_sim_config(double horizon, double warmup, std::uint64_t seed,
                               int replications, std::vector<double> tail_levels,
                               std::vector<double> cdf_grid,
                               std::vector<double> lst_s_values) {
    sim::SimConfig cfg;
    cfg.horizon = horizon;
    cfg.warmup = warmup;
    cfg.seed = seed;
    cfg.replications = replications;
    cfg.tail_levels = std::move(tail_levels);
    cfg.cdf_grid = std::move(cdf_grid);
    cfg.lst_s_values = std::move(lst_s_values);
    return cfg;
}

py::dict scalar_dict(const sim::ScalarEstimate& e) {
    py::dict d;
    d["value"] = e.value;
    d["std_error"] = e.std_error;
    return d;
}

py::list levels_list(const std::vector<sim::LevelEstimate>& levels) {
    py::list out;
    for (const auto& l : levels) {
        py::dict d;
        d["level"] = l.level;
        d["value"] = l.probability.value;
        d["std_error"] = l.probability.std_error;
        out.append(d);
    }
    return out;
}

py::dict queue_dict(const sim::QueueEstimate& q) {
    py::dict d;
    d["time_avg_workload"] = scalar_dict(q.time_avg_workload);
    d["workload_second_moment"] = scalar_dict(q.workload_second_moment);
    d["zero_fraction"] = scalar_dict(q.zero_fraction);
    d["occupancy"] = scalar_dict(q.occupancy);
    d["tail_exceedance"] = levels_list(q.tail_exceedance);
    d["cdf"] = levels_list(q.cdf);
    return d;
}

std::vector<double> to_vector(const perturb::RowVector& v) {
    return {v.data(), v.data() + v.size()};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "two-queue random time-limited polling toolkit";

    py::register_exception<Error>(m, "PollingError");

    py::class_<ServiceDistribution>(m, "ServiceDistribution")
        .def_static("exponential", &ServiceDistribution::exponential, py::arg("rate"))
        .def_static("deterministic", &ServiceDistribution::deterministic, py::arg("value"))
        .def_static("erlang", &ServiceDistribution::erlang, py::arg("shape"), py::arg("rate"))
        .def_static("hyper_exponential", &ServiceDistribution::hyper_exponential,
                    py::arg("probs"), py::arg("rates"))
        .def_static("pareto", &ServiceDistribution::pareto, py::arg("tail_index"),
                    py::arg("scale"))
        .def("moment", &ServiceDistribution::moment, py::arg("k"))
        .def("mean", &ServiceDistribution::mean)
        .def("lst", &ServiceDistribution::lst, py::arg("s"))
        .def("survival", &ServiceDistribution::survival, py::arg("x"))
        .def("residual_survival", &ServiceDistribution::residual_survival, py::arg("x"))
        .def("heavy_tailed", &ServiceDistribution::heavy_tailed)
        .def("__repr__", &ServiceDistribution::describe);

    py::class_<PollingModel>(m, "PollingModel")
        .def(py::init([](double lambda1, const ServiceDistribution& service1, double c1,
                         double lambda2, const ServiceDistribution& service2, double c2) {
                 return PollingModel({lambda1, service1, c1}, {lambda2, service2, c2});
             }),
             py::arg("lambda1"), py::arg("service1"), py::arg("c1"), py::arg("lambda2"),
             py::arg("service2"), py::arg("c2"))
        .def("mirrored", &PollingModel::mirrored)
        .def("rho", &PollingModel::rho, py::arg("queue_index"));

    m.def("check_stability", [](const PollingModel& model) {
        const StabilityReport r = check_stability(model);
        py::dict d;
        d["stable"] = r.stable;
        d["rho1"] = r.rho1;
        d["rho2"] = r.rho2;
        d["bound1"] = r.bound1;
        d["bound2"] = r.bound2;
        return d;
    });

    m.def("busy_period_lst", &busy_period_lst, py::arg("lambda_"), py::arg("service"),
          py::arg("s"), py::arg("max_iterations") = 100000);
    m.def("mg1_workload_lst", &mg1_workload_lst, py::arg("lambda_"), py::arg("service"),
          py::arg("s"));
    m.def("marginal_workload_lst", &marginal_workload_lst, py::arg("model"),
          py::arg("queue_index"), py::arg("s"));
    m.def("switch_epoch_lst", &switch_epoch_lst, py::arg("model"), py::arg("s"));
    m.def("visit_end_lst", &visit_end_lst, py::arg("model"), py::arg("s"));
    m.def("y_lst", &y_lst, py::arg("model"), py::arg("s"));
    m.def("workload_mean", &workload_mean, py::arg("model"), py::arg("queue_index"));
    m.def("workload_variance", &workload_variance, py::arg("model"), py::arg("queue_index"));
    m.def("workload_cdf", &invert_workload_cdf, py::arg("model"), py::arg("queue_index"),
          py::arg("x"));
    m.def("workload_atom", &workload_atom, py::arg("model"), py::arg("queue_index"));

    m.def("ht_coefficients", [](const PollingModel& model) {
        const HeavyTrafficCoefficients c = ht_coefficients(model);
        py::dict d;
        d["a0"] = c.a0;
        d["a1"] = c.a1;
        d["a2"] = c.a2;
        return d;
    });
    m.def("ht_limit_mean", &ht_limit_mean, py::arg("model"));
    m.def("ht_scaled_lst", &ht_scaled_lst, py::arg("model"), py::arg("s"));
    m.def(
        "heavy_tail_asymptote",
        [](const PollingModel& model, const std::string& which) {
            TailComponent component = TailComponent::v1;
            if (which == "mg1")
                component = TailComponent::mg1;
            else if (which == "y")
                component = TailComponent::y;
            else
                require(which == "v1", Errc::validation, "which must be v1, mg1 or y");
            const TailAsymptote t = heavy_tail_asymptote(model, component);
            py::dict d;
            d["prefactor"] = t.prefactor;
            d["exponent"] = t.exponent;
            d["note"] = t.note;
            return d;
        },
        py::arg("model"), py::arg("which") = "v1");
    m.def("subexp_tail_approx", &subexp_tail_approx, py::arg("model"), py::arg("x"));
    m.def("one_big_jump_integral", &one_big_jump_integral, py::arg("model"), py::arg("x"));
    m.def("contraction_delta", &contraction_delta, py::arg("model"), py::arg("nu"));
    m.def("mittag_leffler_limit_lst", &mittag_leffler_limit_lst, py::arg("mean_b"),
          py::arg("nu"), py::arg("s"));
    m.def("work_conservation_gap", [](const PollingModel& model) {
        const WorkConservationGap g = work_conservation_gap(model);
        py::dict d;
        d["polling_total"] = g.polling_total;
        d["conserving_total"] = g.conserving_total;
        return d;
    });

    py::class_<SymmetricModel>(m, "SymmetricModel")
        .def(py::init<double, ServiceDistribution, double>(), py::arg("lambda_"),
             py::arg("service"), py::arg("c"));
    m.def("kernel_eval", &kernel_eval, py::arg("model"), py::arg("s1"), py::arg("s2"));
    m.def("contour_point", &contour_point, py::arg("model"), py::arg("theta"));
    m.def(
        "trace_contour",
        [](const SymmetricModel& sym, int n_points) {
            py::list out;
            for (const auto& p : trace_contour(sym, n_points)) {
                py::dict d;
                d["theta"] = p.theta;
                d["z"] = p.z;
                d["kernel_residual"] = p.kernel_residual;
                out.append(d);
            }
            return out;
        },
        py::arg("model"), py::arg("n_points"));

    m.def(
        "simulate",
        [](const PollingModel& model, double horizon, double warmup, std::uint64_t seed,
           int replications, std::vector<double> tail_levels, std::vector<double> cdf_grid,
           std::vector<double> lst_s_values) {
            const sim::SimEstimate est = sim::simulate(
                model, make_sim_config(horizon, warmup, seed, replications,
                                       std::move(tail_levels), std::move(cdf_grid),
                                       std::move(lst_s_values)));
            py::dict d;
            d["queue1"] = queue_dict(est.queue1);
            d["queue2"] = queue_dict(est.queue2);
            py::dict sw;
            sw["count"] = est.switch_epoch.count;
            sw["lst"] = levels_list(est.switch_epoch.lst);
            d["switch_epoch"] = sw;
            d["stable"] = est.stable;
            d["max_conservation_defect"] = est.max_conservation_defect;
            return d;
        },
        py::arg("model"), py::arg("horizon") = 1e6, py::arg("warmup") = 1e3,
        py::arg("seed") = 1, py::arg("replications") = 1,
        py::arg("tail_levels") = std::vector<double>{},
        py::arg("cdf_grid") = std::vector<double>{},
        py::arg("lst_s_values") = std::vector<double>{});

    m.def("estimate_lst", [](const std::vector<double>& samples, double s) {
        const sim::LstEstimate e = sim::estimate_lst(samples, s);
        py::dict d;
        d["value"] = e.value;
        d["std_error"] = e.std_error;
        return d;
    });

    py::class_<perturb::ExpModel>(m, "ExpModel")
        .def(py::init([](double lambda1, double lambda2, double mu1, double mu2, double c1,
                         double c2) {
                 perturb::ExpModel model{lambda1, lambda2, mu1, mu2, c1, c2};
                 model.validate();
                 return model;
             }),
             py::arg("lambda1"), py::arg("lambda2"), py::arg("mu1"), py::arg("mu2"),
             py::arg("c1"), py::arg("c2"));

    py::class_<perturb::Workspace>(m, "PerturbationWorkspace")
        .def(py::init([](const perturb::ExpModel& model, int n1, int n2) {
                 return perturb::Workspace(model, {n1, n2});
             }),
             py::arg("model"), py::arg("n1"), py::arg("n2"))
        .def("pi0", [](const perturb::Workspace& w) { return to_vector(w.pi0()); })
        .def(
            "series_stationary",
            [](const perturb::Workspace& w, double epsilon, int terms) {
                return to_vector(w.series_stationary(epsilon, terms).probabilities);
            },
            py::arg("epsilon"), py::arg("terms") = 20)
        .def(
            "resolvent_stationary",
            [](const perturb::Workspace& w, double epsilon) {
                return to_vector(w.resolvent_stationary(epsilon).probabilities);
            },
            py::arg("epsilon"))
        .def("phi_residuals", [](const perturb::Workspace& w) {
            const auto& r = w.phi_residuals();
            py::dict d;
            d["phi_gamma"] = r.phi_gamma;
            d["gamma_phi_interior"] = r.gamma_phi;
            d["row_sums"] = r.row_sums;
            d["pibar_phi"] = r.pibar_phi;
            return d;
        });

    m.def(
        "direct_stationary",
        [](const perturb::ExpModel& model, int n1, int n2, double epsilon) {
            return to_vector(
                perturb::direct_stationary({n1, n2}, model, epsilon).probabilities);
        },
        py::arg("model"), py::arg("n1"), py::arg("n2"), py::arg("epsilon"));

    m.def("total_variation", [](const std::vector<double>& p, const std::vector<double>& q) {
        require(p.size() == q.size(), Errc::dimension_mismatch,
                "total variation needs equal-length vectors");
        double tv = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
        return 0.5 * tv;
    });
}
