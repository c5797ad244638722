#include "pollinglab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "pollinglab/rng.hpp"

namespace pollinglab::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ScalarEstimate combine(const std::vector<double>& per_rep) {
    ScalarEstimate e{};
    const std::size_t n = per_rep.size();
    if (n == 0) return e;
    double sum = 0.0;
    for (double v : per_rep) sum += v;
    e.value = sum / static_cast<double>(n);
    if (n >= 2) {
        double ss = 0.0;
        for (double v : per_rep) ss += (v - e.value) * (v - e.value);
        e.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    return e;
}

// time-integral accumulators for one queue within one replication
struct QueueAccumulator {
    double workload_time = 0.0;         // int V dt
    double workload_sq_time = 0.0;      // int V^2 dt
    double positive_time = 0.0;         // time with V > 0
    double occupancy_time = 0.0;        // time the server resides here
    std::vector<double> above_level;    // time with V > x per tail level
    std::vector<double> at_most_level;  // time with V <= x per cdf level
};

struct Replication {
    // per-queue scalar results (time averages over the measured span)
    std::array<double, 2> time_avg{}, second_moment{}, zero_fraction{}, occupancy{};
    std::vector<double> tail_prob1, cdf_prob1, tail_prob2, cdf_prob2;
    std::vector<double> switch_lst_sums;  // sums of exp(-s V1) at visit ends
    std::uint64_t switch_count = 0;
    std::vector<double> switch_samples;  // capped
    double conservation_defect = 0.0;
};

class WorkloadRun {
public:
    WorkloadRun(const PollingModel& model, const SimConfig& config, int rep)
        : model_(model),
          config_(config),
          rng_(config.seed, static_cast<std::uint64_t>(rep)) {
        for (int q = 0; q < 2; ++q) {
            acc_[q].above_level.assign(config.tail_levels.size(), 0.0);
            acc_[q].at_most_level.assign(config.cdf_grid.size(), 0.0);
        }
        lst_sums_.assign(config.lst_s_values.size(), 0.0);
    }

    Replication run() {
        schedule_initial();
        while (true) {
            const double next_event = std::min({arrival_at_[0], arrival_at_[1], timer_at_});
            if (next_event >= config_.horizon) {
                advance(config_.horizon);
                break;
            }
            advance(next_event);
            fire_event(next_event);
        }
        return finish();
    }

private:
    void schedule_initial() {
        arrival_at_[0] = next_arrival(0);
        arrival_at_[1] = next_arrival(1);
        timer_at_ = rng_.exponential(model_.queue(server_ + 1).c);
    }

    double next_arrival(int q) {
        const double lambda = model_.queue(q + 1).lambda;
        return lambda > 0.0 ? now_ + rng_.exponential(lambda) : kInf;
    }

    // move time forward to t, splitting at the warmup boundary so statistics
    // only cover the measured span
    void advance(double t) {
        if (t <= now_) return;
        if (now_ < config_.warmup && t > config_.warmup) {
            integrate_segment(config_.warmup - now_, false);
            now_ = config_.warmup;
        }
        const bool measured = now_ >= config_.warmup;
        integrate_segment(t - now_, measured);
        now_ = t;
    }

    // the attended workload drains at unit rate until it hits zero; the other
    // queue holds level; all statistics are exact on the piecewise path
    void integrate_segment(double dt, bool measured) {
        if (dt <= 0.0) return;
        const int a = server_;
        const double va = workload_[a];
        const double drain = std::min(dt, va);
        if (measured) {
            QueueAccumulator& qa = acc_[a];
            qa.occupancy_time += dt;
            qa.workload_time += va * drain - 0.5 * drain * drain;
            const double v_end = va - drain;
            qa.workload_sq_time += (va * va * va - v_end * v_end * v_end) / 3.0;
            qa.positive_time += drain;
            for (std::size_t i = 0; i < config_.tail_levels.size(); ++i) {
                const double x = config_.tail_levels[i];
                qa.above_level[i] += std::min(drain, std::max(0.0, va - x));
            }
            for (std::size_t i = 0; i < config_.cdf_grid.size(); ++i) {
                const double x = config_.cdf_grid[i];
                qa.at_most_level[i] += dt - std::min(drain, std::max(0.0, va - x));
            }

            const int o = 1 - a;
            const double vo = workload_[o];
            QueueAccumulator& qo = acc_[o];
            qo.workload_time += vo * dt;
            qo.workload_sq_time += vo * vo * dt;
            if (vo > 0.0) qo.positive_time += dt;
            for (std::size_t i = 0; i < config_.tail_levels.size(); ++i)
                if (vo > config_.tail_levels[i]) qo.above_level[i] += dt;
            for (std::size_t i = 0; i < config_.cdf_grid.size(); ++i)
                if (vo <= config_.cdf_grid[i]) qo.at_most_level[i] += dt;
        }
        drained_[a] += drain;
        workload_[a] = va - drain;
    }

    void fire_event(double t) {
        if (t == timer_at_) {
            const bool leaving_queue2 = server_ == 1;
            server_ = 1 - server_;
            timer_at_ = now_ + rng_.exponential(model_.queue(server_ + 1).c);
            if (leaving_queue2 && now_ >= config_.warmup) record_switch_sample();
            return;
        }
        const int q = (t == arrival_at_[0]) ? 0 : 1;
        const double b = model_.queue(q + 1).service.sample(rng_);
        workload_[q] += b;
        arrived_[q] += b;
        arrival_at_[q] = next_arrival(q);
    }

    void record_switch_sample() {
        const double v1 = workload_[0];
        ++switch_count_;
        for (std::size_t i = 0; i < config_.lst_s_values.size(); ++i)
            lst_sums_[i] += std::exp(-config_.lst_s_values[i] * v1);
        if (switch_samples_.size() < config_.max_switch_samples)
            switch_samples_.push_back(v1);
    }

    Replication finish() {
        Replication rep;
        const double span = config_.horizon - config_.warmup;
        for (int q = 0; q < 2; ++q) {
            rep.time_avg[q] = acc_[q].workload_time / span;
            rep.second_moment[q] = acc_[q].workload_sq_time / span;
            rep.zero_fraction[q] = (span - acc_[q].positive_time) / span;
            rep.occupancy[q] = acc_[q].occupancy_time / span;
        }
        auto to_prob = [span](const std::vector<double>& times) {
            std::vector<double> out(times.size());
            for (std::size_t i = 0; i < times.size(); ++i) out[i] = times[i] / span;
            return out;
        };
        rep.tail_prob1 = to_prob(acc_[0].above_level);
        rep.cdf_prob1 = to_prob(acc_[0].at_most_level);
        rep.tail_prob2 = to_prob(acc_[1].above_level);
        rep.cdf_prob2 = to_prob(acc_[1].at_most_level);
        rep.switch_lst_sums = lst_sums_;
        rep.switch_count = switch_count_;
        rep.switch_samples = std::move(switch_samples_);

        double defect = 0.0;
        for (int q = 0; q < 2; ++q) {
            const double in = arrived_[q];
            const double out = drained_[q] + workload_[q];
            defect = std::max(defect, std::abs(in - out) / std::max(1.0, in));
        }
        rep.conservation_defect = defect;
        return rep;
    }

    const PollingModel& model_;
    const SimConfig& config_;
    Rng rng_;

    double now_ = 0.0;
    int server_ = 0;  // 0-based queue index the server attends
    std::array<double, 2> workload_{}, arrived_{}, drained_{};
    std::array<double, 2> arrival_at_{kInf, kInf};
    double timer_at_ = kInf;
    std::array<QueueAccumulator, 2> acc_{};
    std::vector<double> lst_sums_;
    std::vector<double> switch_samples_;
    std::uint64_t switch_count_ = 0;
};

QueueEstimate build_queue_estimate(const std::vector<Replication>& reps, int q,
                                   const SimConfig& config) {
    QueueEstimate est;
    std::vector<double> buf(reps.size());
    const auto gather = [&reps, &buf](auto&& get) {
        for (std::size_t r = 0; r < reps.size(); ++r) buf[r] = get(reps[r]);
        return combine(buf);
    };
    est.time_avg_workload = gather([q](const Replication& r) { return r.time_avg[q]; });
    est.workload_second_moment =
        gather([q](const Replication& r) { return r.second_moment[q]; });
    est.zero_fraction = gather([q](const Replication& r) { return r.zero_fraction[q]; });
    est.occupancy = gather([q](const Replication& r) { return r.occupancy[q]; });
    for (std::size_t i = 0; i < config.tail_levels.size(); ++i) {
        est.tail_exceedance.push_back(
            {config.tail_levels[i], gather([q, i](const Replication& r) {
                 return q == 0 ? r.tail_prob1[i] : r.tail_prob2[i];
             })});
    }
    for (std::size_t i = 0; i < config.cdf_grid.size(); ++i) {
        est.cdf.push_back({config.cdf_grid[i], gather([q, i](const Replication& r) {
                               return q == 0 ? r.cdf_prob1[i] : r.cdf_prob2[i];
                           })});
    }
    return est;
}

} // namespace

void SimConfig::validate() const {
    require(std::isfinite(horizon) && horizon > 0.0, Errc::config, "horizon must be > 0");
    require(warmup >= 0.0 && warmup < horizon, Errc::config,
            "need horizon > warmup >= 0");
    require(replications >= 1, Errc::config, "replications must be >= 1");
    for (double x : tail_levels)
        require(x >= 0.0, Errc::config, "tail levels must be >= 0");
    for (double x : cdf_grid) require(x >= 0.0, Errc::config, "cdf grid must be >= 0");
    for (double s : lst_s_values)
        require(s >= 0.0, Errc::config, "lst s-values must be >= 0");
}

SimEstimate simulate(const PollingModel& model, const SimConfig& config) {
    config.validate();
    std::vector<Replication> reps;
    reps.reserve(static_cast<std::size_t>(config.replications));
    for (int r = 0; r < config.replications; ++r)
        reps.push_back(WorkloadRun(model, config, r).run());

    SimEstimate est;
    est.stable = check_stability(model).stable;
    est.horizon = config.horizon;
    est.warmup = config.warmup;
    est.seed = config.seed;
    est.replications = config.replications;
    est.queue1 = build_queue_estimate(reps, 0, config);
    est.queue2 = build_queue_estimate(reps, 1, config);

    for (const Replication& r : reps) {
        est.switch_epoch.count += r.switch_count;
        est.max_conservation_defect =
            std::max(est.max_conservation_defect, r.conservation_defect);
        for (int q = 0; q < 2; ++q)
            est.rep_time_avg_workload[q].push_back(r.time_avg[q]);
    }
    std::vector<double> buf(reps.size());
    for (std::size_t i = 0; i < config.lst_s_values.size(); ++i) {
        for (std::size_t r = 0; r < reps.size(); ++r)
            buf[r] = reps[r].switch_count > 0
                         ? reps[r].switch_lst_sums[i] / static_cast<double>(reps[r].switch_count)
                         : 1.0;
        est.switch_epoch.lst.push_back({config.lst_s_values[i], combine(buf)});
    }
    for (const Replication& r : reps) {
        for (double v : r.switch_samples) {
            if (est.switch_epoch.samples.size() >= config.max_switch_samples) break;
            est.switch_epoch.samples.push_back(v);
        }
    }
    return est;
}

LstEstimate estimate_lst(const std::vector<double>& samples, double s) {
    require(!samples.empty(), Errc::empty_sample, "estimate_lst needs samples");
    require(s >= 0.0, Errc::validation, "estimate_lst needs s >= 0");
    if (s == 0.0) return {1.0, 0.0};
    double sum = 0.0;
    for (double x : samples) sum += std::exp(-s * x);
    const double n = static_cast<double>(samples.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : samples) {
        const double d = std::exp(-s * x) - mean;
        ss += d * d;
    }
    const double std_error = samples.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return {mean, std_error};
}

double QueueLengthFrequencies::joint_queue_frequency(int n1, int n2) const {
    double total = 0.0;
    for (const QueueLengthCell& cell : cells)
        if (cell.n1 == n1 && cell.n2 == n2) total += cell.frequency;
    return total;
}

QueueLengthFrequencies simulate_queue_lengths(const PollingModel& model, double epsilon,
                                              const SimConfig& config) {
    config.validate();
    require(epsilon > 0.0 && epsilon <= 1.0, Errc::config, "epsilon must be in (0,1]");
    const auto& s1 = model.q1().service;
    const auto& s2 = model.q2().service;
    require(s1.kind() == ServiceDistribution::Kind::exponential &&
                s2.kind() == ServiceDistribution::Kind::exponential,
            Errc::non_exponential_service,
            "queue-length mode requires exponential services at both queues");

    const std::array<double, 2> lambda{epsilon * model.q1().lambda,
                                       epsilon * model.q2().lambda};
    const std::array<double, 2> mu{epsilon * s1.param_a(), epsilon * s2.param_a()};
    const std::array<double, 2> c{model.q1().c, model.q2().c};

    using Key = std::uint64_t;
    // k01 is the 0-based server position; reported cells use k = k01 + 1
    const auto key_of = [](int n1, int n2, int k01) {
        return (static_cast<Key>(n1) << 32) | (static_cast<Key>(n2) << 1) |
               static_cast<Key>(k01);
    };

    std::vector<std::map<Key, double>> tables(static_cast<std::size_t>(config.replications));
    std::array<std::vector<double>, 2> server_frac;
    server_frac[0].resize(static_cast<std::size_t>(config.replications));
    server_frac[1].resize(static_cast<std::size_t>(config.replications));

    for (int r = 0; r < config.replications; ++r) {
        Rng rng(config.seed, static_cast<std::uint64_t>(r));
        double now = 0.0;
        int n[2] = {0, 0};
        int k = 0;
        auto& table = tables[static_cast<std::size_t>(r)];
        double at_queue1 = 0.0;
        while (now < config.horizon) {
            const double service_rate = n[k] > 0 ? mu[k] : 0.0;
            const double total = lambda[0] + lambda[1] + service_rate + c[k];
            const double dwell = rng.exponential(total);
            const double credited =
                std::min(config.horizon, now + dwell) - std::max(now, config.warmup);
            if (credited > 0.0) {
                table[key_of(n[0], n[1], k)] += credited;
                if (k == 0) at_queue1 += credited;
            }
            now += dwell;
            if (now >= config.horizon) break;
            const double u = rng.next_unit() * total;
            if (u < lambda[0])
                ++n[0];
            else if (u < lambda[0] + lambda[1])
                ++n[1];
            else if (u < lambda[0] + lambda[1] + service_rate)
                --n[k];
            else
                k = 1 - k;
        }
        const double span = config.horizon - config.warmup;
        for (auto& [key, t] : table) t /= span;
        server_frac[0][static_cast<std::size_t>(r)] = at_queue1 / span;
        server_frac[1][static_cast<std::size_t>(r)] = 1.0 - at_queue1 / span;
    }

    // merge replications cell-wise (absent cell = frequency 0)
    std::map<Key, std::vector<double>> merged;
    for (std::size_t r = 0; r < tables.size(); ++r)
        for (const auto& [key, f] : tables[r]) {
            auto& v = merged[key];
            v.resize(tables.size(), 0.0);
            v[r] = f;
        }

    QueueLengthFrequencies out;
    out.epsilon = epsilon;
    out.replications = config.replications;
    for (auto& [key, per_rep] : merged) {
        per_rep.resize(tables.size(), 0.0);
        const ScalarEstimate e = combine(per_rep);
        QueueLengthCell cell;
        cell.n1 = static_cast<int>(key >> 32);
        cell.n2 = static_cast<int>((key >> 1) & 0x7FFFFFFFULL);
        cell.k = static_cast<int>(key & 1ULL) + 1;
        cell.frequency = e.value;
        cell.std_error = e.std_error;
        out.cells.push_back(cell);
    }
    out.server_marginal[0] = combine(server_frac[0]);
    out.server_marginal[1] = combine(server_frac[1]);
    return out;
}

} // namespace pollinglab::sim
