// pollinglab CLI: analyze | simulate | perturb | contour
//
// The model document is JSON (see schemas/model.schema.json). It may carry
// optional per-command option blocks ("analyze", "simulate", "perturb",
// "contour"); command-line flags override block values. Outputs are JSON or
// CSV with identical numbers; CSV floats use 17 significant digits.
// Exit codes: 0 success, 2 validation/parse failure, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "pollinglab/asymptotics.hpp"
#include "pollinglab/config.hpp"
#include "pollinglab/kernel.hpp"
#include "pollinglab/perturbation.hpp"
#include "pollinglab/simulator.hpp"
#include "pollinglab/transforms.hpp"

namespace pl = pollinglab;
using Json = nlohmann::json;

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) pl::fail(pl::Errc::config, "cannot open output path \"" + out_path + "\"");
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

// model file with optional per-command option blocks
struct LoadedConfig {
    pl::PollingModel model;
    Json blocks;  // command name -> options object
};

LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) pl::fail(pl::Errc::parse, "cannot open model file \"" + path + "\"");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        pl::fail(pl::Errc::parse, std::string("model file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) pl::fail(pl::Errc::validation, "config must be a JSON object");

    Json model_doc = Json::object();
    Json blocks = Json::object();
    const std::set<std::string> command_blocks = {"analyze", "simulate", "perturb",
                                                  "contour"};
    for (const auto& [key, value] : doc.items()) {
        if (command_blocks.count(key))
            blocks[key] = value;
        else
            model_doc[key] = value;
    }
    return {pl::config::parse_model(model_doc), blocks};
}

double block_number(const Json& blocks, const std::string& cmd, const std::string& key,
                    double fallback) {
    if (blocks.contains(cmd) && blocks.at(cmd).contains(key))
        return blocks.at(cmd).at(key).get<double>();
    return fallback;
}

std::vector<double> block_array(const Json& blocks, const std::string& cmd,
                                const std::string& key, std::vector<double> fallback) {
    if (blocks.contains(cmd) && blocks.at(cmd).contains(key))
        return blocks.at(cmd).at(key).get<std::vector<double>>();
    return fallback;
}

Json scalar_json(const pl::sim::ScalarEstimate& e) {
    return {{"value", e.value}, {"std_error", e.std_error}};
}

Json levels_json(const std::vector<pl::sim::LevelEstimate>& levels, const char* key) {
    Json arr = Json::array();
    for (const auto& l : levels)
        arr.push_back({{key, l.level},
                       {"value", l.probability.value},
                       {"std_error", l.probability.std_error}});
    return arr;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeResult {
    Json json;
};

AnalyzeResult run_analyze(const pl::PollingModel& model, int queue_index,
                          const std::vector<double>& s_grid, bool asymptotics) {
    Json out;
    out["schema"] = {{"name", "pollinglab-analyze"}, {"version", 1}};
    out["model"] = pl::config::model_to_json(model);
    out["queue"] = queue_index;

    const pl::StabilityReport stab = pl::check_stability(model);
    out["stability"] = {{"stable", stab.stable}, {"rho1", stab.rho1},
                        {"rho2", stab.rho2},     {"bound1", stab.bound1},
                        {"bound2", stab.bound2}};

    const pl::PollingModel view = queue_index == 1 ? model : model.mirrored();
    const bool heavy = view.q1().service.heavy_tailed();
    Json notes = Json::array();

    out["mean"] = nullptr;
    out["variance"] = nullptr;
    out["workload_atom"] = nullptr;
    out["lst_table"] = nullptr;
    out["decomposition_residual_max"] = nullptr;
    if (stab.stable && !heavy) {
        out["mean"] = pl::workload_mean(model, queue_index);
        out["variance"] = pl::workload_variance(model, queue_index);
        out["workload_atom"] = pl::workload_atom(model, queue_index);
        Json table = Json::array();
        double max_resid = 0.0;
        for (double s : s_grid) {
            const pl::Complex sc(s, 0.0);
            const double marginal = pl::marginal_workload_lst(model, queue_index, sc).real();
            const double mg1 =
                pl::mg1_workload_lst(view.q1().lambda, view.q1().service, sc).real();
            const double y = pl::y_lst(view, sc).real();
            const double sw = pl::switch_epoch_lst(view, sc).real();
            const double resid = std::abs(marginal - mg1 * y);
            max_resid = std::max(max_resid, resid);
            table.push_back({{"s", s},
                             {"marginal", marginal},
                             {"mg1", mg1},
                             {"y", y},
                             {"switch_epoch", sw},
                             {"decomposition_residual", resid}});
        }
        out["lst_table"] = table;
        out["decomposition_residual_max"] = max_resid;
    } else {
        notes.push_back(heavy ? "transform-level results skipped: heavy-tailed service"
                              : "transform-level results skipped: model unstable");
    }

    out["heavy_traffic"] = nullptr;
    out["tail"] = nullptr;
    out["work_conservation"] = nullptr;
    if (asymptotics) {
        try {
            const pl::HeavyTrafficCoefficients ht = pl::ht_coefficients(view);
            out["heavy_traffic"] = {{"a0", ht.a0},
                                    {"a1", ht.a1},
                                    {"a2", ht.a2},
                                    {"limit_mean", pl::ht_limit_mean(view)}};
        } catch (const pl::Error&) {
            notes.push_back("heavy-traffic coefficients skipped: infinite service moment");
        }
        if (heavy && stab.stable) {
            try {
                const auto v1 = pl::heavy_tail_asymptote(view, pl::TailComponent::v1);
                const auto mg1 = pl::heavy_tail_asymptote(view, pl::TailComponent::mg1);
                const auto y = pl::heavy_tail_asymptote(view, pl::TailComponent::y);
                out["tail"] = {{"v1_prefactor", v1.prefactor},
                               {"mg1_prefactor", mg1.prefactor},
                               {"y_prefactor", y.prefactor},
                               {"exponent", v1.exponent}};
            } catch (const pl::Error&) {
                notes.push_back("tail asymptote skipped: tail index outside (1,2)");
            }
        }
        try {
            const pl::WorkConservationGap gap = pl::work_conservation_gap(model);
            out["work_conservation"] = {{"polling_total", gap.polling_total},
                                        {"conserving_total", gap.conserving_total}};
        } catch (const pl::Error&) {
            // asymmetric or unstable: block stays null
        }
    }
    out["notes"] = notes;
    return {out};
}

std::string analyze_csv(const Json& j) {
    std::ostringstream out;
    out << "key,value\n";
    const auto scalar = [&out, &j](const char* key) {
        out << key << ",";
        if (j.at(key).is_null())
            out << "";
        else
            out << format_double(j.at(key).get<double>());
        out << "\n";
    };
    out << "stable," << (j.at("stability").at("stable").get<bool>() ? 1 : 0) << "\n";
    for (const char* key : {"rho1", "rho2", "bound1", "bound2"})
        out << key << "," << format_double(j.at("stability").at(key).get<double>()) << "\n";
    scalar("mean");
    scalar("variance");
    scalar("workload_atom");
    scalar("decomposition_residual_max");
    if (!j.at("heavy_traffic").is_null())
        for (const char* key : {"a0", "a1", "a2", "limit_mean"})
            out << "ht_" << key << ","
                << format_double(j.at("heavy_traffic").at(key).get<double>()) << "\n";
    if (!j.at("tail").is_null())
        for (const char* key : {"v1_prefactor", "mg1_prefactor", "y_prefactor", "exponent"})
            out << "tail_" << key << ","
                << format_double(j.at("tail").at(key).get<double>()) << "\n";
    if (!j.at("work_conservation").is_null())
        for (const char* key : {"polling_total", "conserving_total"})
            out << key << ","
                << format_double(j.at("work_conservation").at(key).get<double>()) << "\n";
    if (!j.at("lst_table").is_null()) {
        out << "\ns,marginal,mg1,y,switch_epoch,decomposition_residual\n";
        for (const auto& row : j.at("lst_table")) {
            out << format_double(row.at("s").get<double>());
            for (const char* key : {"marginal", "mg1", "y", "switch_epoch",
                                    "decomposition_residual"})
                out << "," << format_double(row.at(key).get<double>());
            out << "\n";
        }
    }
    return out.str();
}

// ---------------------------------------------------------------- simulate

Json simulate_json(const pl::PollingModel& model, const pl::sim::SimConfig& cfg,
                   const pl::sim::SimEstimate& est) {
    Json out;
    out["schema"] = {{"name", "pollinglab-simulate"}, {"version", 1}};
    out["model"] = pl::config::model_to_json(model);
    out["config"] = {{"horizon", cfg.horizon},
                     {"warmup", cfg.warmup},
                     {"seed", cfg.seed},
                     {"replications", cfg.replications},
                     {"tail_levels", cfg.tail_levels},
                     {"cdf_grid", cfg.cdf_grid},
                     {"lst_s_values", cfg.lst_s_values}};
    out["stable"] = est.stable;
    out["max_conservation_defect"] = est.max_conservation_defect;
    const auto queue_json = [](const pl::sim::QueueEstimate& q) {
        Json j;
        j["time_avg_workload"] = scalar_json(q.time_avg_workload);
        j["workload_second_moment"] = scalar_json(q.workload_second_moment);
        j["zero_fraction"] = scalar_json(q.zero_fraction);
        j["occupancy"] = scalar_json(q.occupancy);
        j["tail_exceedance"] = levels_json(q.tail_exceedance, "x");
        j["cdf"] = levels_json(q.cdf, "x");
        return j;
    };
    out["queue1"] = queue_json(est.queue1);
    out["queue2"] = queue_json(est.queue2);
    out["switch_epoch"] = {{"count", est.switch_epoch.count},
                           {"lst", levels_json(est.switch_epoch.lst, "s")}};
    return out;
}

std::string simulate_csv(const Json& j) {
    std::ostringstream out;
    out << "metric,queue,level,value,std_error\n";
    const auto row = [&out](const std::string& metric, int queue, const Json& level,
                            const Json& obj) {
        out << metric << "," << queue << ",";
        if (!level.is_null()) out << format_double(level.get<double>());
        out << "," << format_double(obj.at("value").get<double>()) << ","
            << format_double(obj.at("std_error").get<double>()) << "\n";
    };
    for (int q : {1, 2}) {
        const Json& qj = j.at(q == 1 ? "queue1" : "queue2");
        for (const char* key : {"time_avg_workload", "workload_second_moment",
                                "zero_fraction", "occupancy"})
            row(key, q, nullptr, qj.at(key));
        for (const auto& l : qj.at("tail_exceedance")) row("tail_exceedance", q, l.at("x"), l);
        for (const auto& l : qj.at("cdf")) row("cdf", q, l.at("x"), l);
    }
    for (const auto& l : j.at("switch_epoch").at("lst")) row("switch_epoch_lst", 1, l.at("s"), l);
    return out.str();
}

Json queue_lengths_json(const pl::PollingModel& model, const pl::sim::SimConfig& cfg,
                        double epsilon, const pl::sim::QueueLengthFrequencies& freq) {
    Json out;
    out["schema"] = {{"name", "pollinglab-simulate-queue-lengths"}, {"version", 1}};
    out["model"] = pl::config::model_to_json(model);
    out["config"] = {{"horizon", cfg.horizon},
                     {"warmup", cfg.warmup},
                     {"seed", cfg.seed},
                     {"replications", cfg.replications},
                     {"epsilon", epsilon}};
    Json cells = Json::array();
    for (const auto& cell : freq.cells)
        cells.push_back({{"n1", cell.n1},
                         {"n2", cell.n2},
                         {"k", cell.k},
                         {"frequency", cell.frequency},
                         {"std_error", cell.std_error}});
    out["cells"] = cells;
    out["server_marginal"] = {scalar_json(freq.server_marginal[0]),
                              scalar_json(freq.server_marginal[1])};
    return out;
}

std::string queue_lengths_csv(const Json& j) {
    std::ostringstream out;
    out << "n1,n2,k,frequency,std_error\n";
    for (const auto& cell : j.at("cells"))
        out << cell.at("n1").get<int>() << "," << cell.at("n2").get<int>() << ","
            << cell.at("k").get<int>() << ","
            << format_double(cell.at("frequency").get<double>()) << ","
            << format_double(cell.at("std_error").get<double>()) << "\n";
    return out.str();
}

// ---------------------------------------------------------------- perturb

Json stationary_json(const pl::perturb::StationaryDistribution& d) {
    Json j;
    j["method"] = d.method;
    j["epsilon"] = d.epsilon;
    j["renormalization"] = d.renormalization;
    j["residual"] = d.residual;
    j["probabilities"] = std::vector<double>(d.probabilities.data(),
                                             d.probabilities.data() + d.probabilities.size());
    return j;
}

Json marginals_json(const pl::perturb::TruncationSpec& trunc,
                    const pl::perturb::RowVector& pi) {
    std::vector<double> m1(trunc.n1_max + 1, 0.0), m2(trunc.n2_max + 1, 0.0);
    std::array<double, 2> server{0.0, 0.0};
    for (int n1 = 0; n1 <= trunc.n1_max; ++n1)
        for (int n2 = 0; n2 <= trunc.n2_max; ++n2)
            for (int k = 1; k <= 2; ++k) {
                const double p = pi(trunc.state_index(n1, n2, k));
                m1[n1] += p;
                m2[n2] += p;
                server[k - 1] += p;
            }
    return {{"n1", m1}, {"n2", m2}, {"server", server}};
}

// ---------------------------------------------------------------- contour

Json contour_json(const pl::SymmetricModel& sym, int n_points,
                  const std::vector<pl::ContourPoint>& points) {
    Json out;
    out["schema"] = {{"name", "pollinglab-contour"}, {"version", 1}};
    out["model"] = pl::config::model_to_json(sym.as_polling_model());
    out["n_points"] = n_points;
    Json arr = Json::array();
    for (const auto& p : points)
        arr.push_back({{"theta", p.theta},
                       {"re_z", p.z.real()},
                       {"im_z", p.z.imag()},
                       {"kernel_residual", p.kernel_residual}});
    out["points"] = arr;
    return out;
}

std::string contour_csv(const Json& j) {
    std::ostringstream out;
    out << "theta,re_z,im_z,kernel_residual\n";
    for (const auto& p : j.at("points"))
        out << format_double(p.at("theta").get<double>()) << ","
            << format_double(p.at("re_z").get<double>()) << ","
            << format_double(p.at("im_z").get<double>()) << ","
            << format_double(p.at("kernel_residual").get<double>()) << "\n";
    return out.str();
}

int exit_code_for(const pl::Error& e) {
    switch (e.code()) {
        case pl::Errc::validation:
        case pl::Errc::parse:
        case pl::Errc::config:
            return 2;
        default:
            return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-queue random time-limited polling toolkit"};
    app.require_subcommand(1);

    std::string model_path, out_path, format = "json";
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--model", model_path, "model JSON file")->required();
        cmd->add_option("--out", out_path, "output path (default stdout)");
        cmd->add_option("--format", format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    auto* analyze = app.add_subcommand("analyze", "transform-level analysis");
    add_common(analyze);
    int queue_index = 1;
    std::vector<double> s_grid;
    bool with_asymptotics = true;
    analyze->add_option("--queue", queue_index, "queue index (1 or 2)")
        ->check(CLI::IsMember({1, 2}));
    analyze->add_option("--s-grid", s_grid, "transform evaluation points")->delimiter(',');
    analyze->add_flag("--asymptotics,!--no-asymptotics", with_asymptotics,
                      "include heavy-traffic/tail blocks (default on)");

    auto* simulate = app.add_subcommand("simulate", "discrete-event simulation");
    add_common(simulate);
    double horizon = 0, warmup = -1, eps_sim = 1.0;
    std::uint64_t seed = 0;
    int reps = 0;
    std::vector<double> tail_levels, cdf_grid, lst_s;
    std::string mode = "workload";
    simulate->add_option("--horizon", horizon, "simulated time per replication");
    simulate->add_option("--warmup", warmup, "statistics start after this time");
    simulate->add_option("--seed", seed, "base seed (env POLLING_LAB_SEED overrides default)");
    simulate->add_option("--reps", reps, "independent replications");
    simulate->add_option("--tail-levels", tail_levels, "x-levels for P(V > x)")->delimiter(',');
    simulate->add_option("--cdf-grid", cdf_grid, "x-levels for P(V <= x)")->delimiter(',');
    simulate->add_option("--lst-s", lst_s, "s-grid for the switch-epoch LST")->delimiter(',');
    simulate->add_option("--mode", mode, "workload or queue-lengths")
        ->check(CLI::IsMember({"workload", "queue-lengths"}));
    simulate->add_option("--eps", eps_sim, "rate scaling for queue-lengths mode");

    auto* perturb = app.add_subcommand("perturb", "singular-perturbation analysis");
    add_common(perturb);
    int n1 = 0, n2 = 0, terms = 0;
    double eps = -1.0;
    std::string method = "all";
    perturb->add_option("--n1", n1, "queue-1 truncation level");
    perturb->add_option("--n2", n2, "queue-2 truncation level");
    perturb->add_option("--eps", eps, "perturbation parameter (default 0.1)");
    perturb->add_option("--terms", terms, "series terms M");
    perturb->add_option("--method", method, "series, resolvent, direct or all")
        ->check(CLI::IsMember({"series", "resolvent", "direct", "all"}));

    auto* contour = app.add_subcommand("contour", "kernel zero-contour trace");
    add_common(contour);
    int n_points = 0;
    contour->add_option("--points", n_points, "trace points (>= 8)");

    CLI11_PARSE(app, argc, argv);

    try {
        const LoadedConfig cfg = load_config(model_path);
        const Json& blocks = cfg.blocks;

        if (*analyze) {
            const int queue = analyze->count("--queue")
                                  ? queue_index
                                  : static_cast<int>(block_number(blocks, "analyze", "queue", 1));
            std::vector<double> grid =
                analyze->count("--s-grid")
                    ? s_grid
                    : block_array(blocks, "analyze", "s_grid", {0.1, 0.5, 1.0, 2.0, 5.0});
            const AnalyzeResult res = run_analyze(cfg.model, queue, grid, with_asymptotics);
            write_output(format == "json" ? res.json.dump(2) : analyze_csv(res.json), out_path);
        } else if (*simulate) {
            pl::sim::SimConfig sc;
            sc.horizon = simulate->count("--horizon")
                             ? horizon
                             : block_number(blocks, "simulate", "horizon", 1e6);
            sc.warmup = simulate->count("--warmup")
                            ? warmup
                            : block_number(blocks, "simulate", "warmup", 1e3);
            sc.replications = simulate->count("--reps")
                                  ? reps
                                  : static_cast<int>(
                                        block_number(blocks, "simulate", "replications", 1));
            double seed_value = block_number(blocks, "simulate", "seed", 1);
            if (const char* env = std::getenv("POLLING_LAB_SEED"))
                seed_value = std::strtod(env, nullptr);
            sc.seed = simulate->count("--seed") ? seed
                                                : static_cast<std::uint64_t>(seed_value);
            sc.tail_levels = simulate->count("--tail-levels")
                                 ? tail_levels
                                 : block_array(blocks, "simulate", "tail_levels", {});
            sc.cdf_grid = simulate->count("--cdf-grid")
                              ? cdf_grid
                              : block_array(blocks, "simulate", "cdf_grid", {});
            sc.lst_s_values = simulate->count("--lst-s")
                                  ? lst_s
                                  : block_array(blocks, "simulate", "lst_s_values", {});
            const std::string run_mode =
                simulate->count("--mode")
                    ? mode
                    : (blocks.contains("simulate") && blocks["simulate"].contains("mode")
                           ? blocks["simulate"]["mode"].get<std::string>()
                           : "workload");
            if (run_mode == "workload") {
                const pl::sim::SimEstimate est = pl::sim::simulate(cfg.model, sc);
                const Json j = simulate_json(cfg.model, sc, est);
                write_output(format == "json" ? j.dump(2) : simulate_csv(j), out_path);
            } else {
                const double e = simulate->count("--eps")
                                     ? eps_sim
                                     : block_number(blocks, "simulate", "epsilon", 1.0);
                const auto freq = pl::sim::simulate_queue_lengths(cfg.model, e, sc);
                const Json j = queue_lengths_json(cfg.model, sc, e, freq);
                write_output(format == "json" ? j.dump(2) : queue_lengths_csv(j), out_path);
            }
        } else if (*perturb) {
            const pl::perturb::ExpModel exp_model =
                pl::perturb::ExpModel::from_polling(cfg.model);
            pl::perturb::TruncationSpec trunc{
                perturb->count("--n1") ? n1
                                       : static_cast<int>(block_number(blocks, "perturb", "n1", 30)),
                perturb->count("--n2") ? n2
                                       : static_cast<int>(block_number(blocks, "perturb", "n2", 30))};
            double epsilon = perturb->count("--eps")
                                 ? eps
                                 : block_number(blocks, "perturb", "eps", -1.0);
            if (epsilon < 0.0) {
                epsilon = 0.1;
                std::cerr << "note: --eps not given; defaulting to 0.1\n";
            }
            const int m = perturb->count("--terms")
                              ? terms
                              : static_cast<int>(block_number(blocks, "perturb", "terms", 20));
            const std::string mth =
                perturb->count("--method")
                    ? method
                    : (blocks.contains("perturb") && blocks["perturb"].contains("method")
                           ? blocks["perturb"]["method"].get<std::string>()
                           : "all");

            Json out;
            out["schema"] = {{"name", "pollinglab-perturb"}, {"version", 1}};
            out["model"] = pl::config::model_to_json(cfg.model);
            out["truncation"] = {{"n1", trunc.n1_max}, {"n2", trunc.n2_max}};
            out["epsilon"] = epsilon;
            out["terms"] = m;
            Json dists = Json::array();
            Json marginals = Json::object();

            std::optional<pl::perturb::Workspace> ws;
            if (mth == "series" || mth == "resolvent" || mth == "all")
                ws.emplace(exp_model, trunc);

            std::optional<pl::perturb::StationaryDistribution> d_series, d_resolvent,
                d_direct;
            if (mth == "series" || mth == "all") d_series = ws->series_stationary(epsilon, m);
            if (mth == "resolvent" || mth == "all") d_resolvent = ws->resolvent_stationary(epsilon);
            if (mth == "direct" || mth == "all")
                d_direct = pl::perturb::direct_stationary(trunc, exp_model, epsilon);

            for (const auto& opt : {d_series, d_resolvent, d_direct})
                if (opt) {
                    dists.push_back(stationary_json(*opt));
                    marginals[opt->method] = marginals_json(trunc, opt->probabilities);
                }
            out["distributions"] = dists;
            out["marginals"] = marginals;

            Json residuals = Json::object();
            if (ws) {
                const auto& pr = ws->phi_residuals();
                residuals["phi_gamma"] = pr.phi_gamma;
                residuals["gamma_phi_interior"] = pr.gamma_phi;
                residuals["phi_row_sums"] = pr.row_sums;
                residuals["pibar_phi"] = pr.pibar_phi;
            }
            if (d_direct) residuals["direct_generator"] = d_direct->residual;
            out["residuals"] = residuals;

            Json tv = Json::object();
            if (d_series && d_direct)
                tv["series_vs_direct"] = pl::perturb::total_variation(
                    d_series->probabilities, d_direct->probabilities);
            if (d_resolvent && d_direct)
                tv["resolvent_vs_direct"] = pl::perturb::total_variation(
                    d_resolvent->probabilities, d_direct->probabilities);
            if (d_series && d_resolvent)
                tv["series_vs_resolvent"] = pl::perturb::total_variation(
                    d_series->probabilities, d_resolvent->probabilities);
            out["tv_comparisons"] = tv;

            const auto cert = pl::perturb::verify_lyapunov_unperturbed(exp_model);
            const auto agg = pl::perturb::verify_lyapunov_aggregated(trunc, exp_model);
            const auto norm = pl::perturb::verify_g1_norm_bound(trunc, exp_model);
            const auto uni = pl::perturb::check_uniformization(exp_model);
            out["certificates"] = {
                {"uniformization",
                 {{"ok", uni.ok}, {"slack1", uni.slack1}, {"slack2", uni.slack2}}},
                {"lyapunov_unperturbed",
                 {{"pass", cert.pass},
                  {"delta", cert.delta},
                  {"b", cert.b},
                  {"row_slack", cert.row_slack}}},
                {"lyapunov_aggregated",
                 {{"pass", agg.pass},
                  {"delta_bar", agg.delta_bar},
                  {"b_bar", agg.b_bar},
                  {"max_interior_violation", agg.max_interior_violation},
                  {"max_boundary_violation", agg.max_boundary_violation}}},
                {"g1_norm",
                 {{"sup_offdiag", norm.sup_offdiag},
                  {"sup_with_diagonal", norm.sup_with_diagonal},
                  {"g1", norm.g1},
                  {"g2", norm.g2},
                  {"within_bound", norm.within_bound}}}};

            if (format == "json") {
                write_output(out.dump(2), out_path);
            } else {
                std::ostringstream csv;
                csv << "method,kind,index,value\n";
                for (const auto& [mname, marg] : out["marginals"].items()) {
                    for (const char* kind : {"n1", "n2", "server"}) {
                        const auto& arr = marg.at(kind);
                        for (std::size_t i = 0; i < arr.size(); ++i)
                            csv << mname << "," << kind << "," << i << ","
                                << format_double(arr[i].get<double>()) << "\n";
                    }
                }
                write_output(csv.str(), out_path);
            }
        } else if (*contour) {
            const auto& q1 = cfg.model.q1();
            const auto& q2 = cfg.model.q2();
            if (!(q1.lambda == q2.lambda && q1.c == q2.c && q1.service == q2.service))
                pl::fail(pl::Errc::asymmetric_model,
                         "contour requires the fully symmetric model");
            const pl::SymmetricModel sym(q1.lambda, q1.service, q1.c);
            const int pts = contour->count("--points")
                                ? n_points
                                : static_cast<int>(block_number(blocks, "contour", "points", 64));
            const auto points = pl::trace_contour(sym, pts);
            const Json j = contour_json(sym, pts, points);
            write_output(format == "csv" ? contour_csv(j) : j.dump(2), out_path);
        }
    } catch (const pl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
