// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#include "fdswipt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace fdswipt {

std::string to_string(Method m) {
    switch (m) {
        case Method::AntennaSplitSca: return "antenna_split_sca";
        case Method::AntennaSplitEqualPower: return "antenna_split_equal_power";
        case Method::TimeSwitching: return "time_switching";
        case Method::DrlPolicy: return "drl_policy";
        case Method::Exhaustive: return "exhaustive";
    }
    return "unknown";
}

Method parse_method(const std::string& text) {
    for (Method m : {Method::AntennaSplitSca, Method::AntennaSplitEqualPower, Method::TimeSwitching,
                     Method::DrlPolicy, Method::Exhaustive})
        if (to_string(m) == text) return m;
    throw ContractError("unknown method '" + text + "'");
}

void ExperimentScenario::validate() const {
    channel.validate();
    if (ps_dbm.empty()) throw ContractError("scenario: power sweep is empty");
    for (double p : ps_dbm)
        if (!std::isfinite(p)) throw ContractError("scenario: power sweep entries must be finite");
    if (trials < 1) throw ContractError("scenario: trials must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("scenario: alpha must lie in (0,1)");
    if (!(ts_tau > 0.0 && ts_tau < 1.0)) throw ContractError("scenario: time-switching tau must lie in (0,1)");
    sca.validate();
    if (workers < 0) throw ContractError("scenario: workers must be >= 0");
    if (method == Method::Exhaustive) {
        if (exhaustive_grid < 2) throw ContractError("scenario: exhaustive grid must be >= 2");
        if (channel.m > kExhaustiveMaxAntennas || channel.n > kExhaustiveMaxAntennas)
            throw ContractError("scenario: exhaustive method is limited to M, N <= 3");
    }
    if (method == Method::DrlPolicy) {
        if (policy_path.empty()) throw ContractError("scenario: drl_policy needs a policy artifact path");
        if (rollout_steps < 1) throw ContractError("scenario: rollout steps must be >= 1");
    }
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (trial + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

TrialOutcome run_trial(const ExperimentScenario& s, double ps_dbm, int trial, const PolicyArtifact* policy) {
    const double ps = dbm_to_watts(ps_dbm);
    const PowerBudget budget = PowerBudget::at_source_power(ps, s.alpha, s.mixing);
    const double noise = s.channel.noise_power();
    const ChannelRealization chan = sample_channel(s.channel, trial_seed(s.seed, static_cast<std::uint64_t>(trial)));

    TrialOutcome out;
    try {
        switch (s.method) {
            case Method::AntennaSplitSca:
            case Method::AntennaSplitEqualPower: {
                const SubsystemConfig cfg = allocate_antennas(chan, ps, budget.pq, s.seed_rule);
                const SubsystemChannels sub = partition(chan, cfg, noise);
                const CovariancePair qp = s.method == Method::AntennaSplitSca
                                              ? sca_precoding(sub, budget, s.sca).covariances
                                              : equal_power(sub, budget);
                out.rate = info_rate(sub, qp);
                out.harvested_w = harvested_power(sub, qp);
                break;
            }
            case Method::TimeSwitching: {
                const TimeSwitchingOutcome ts = time_switching(chan, budget, s.ts_tau, noise);
                out.rate = ts.rate;
                out.harvested_w = ts.harvested_watts;
                break;
            }
            case Method::Exhaustive: {
                const ExhaustiveResult ex = exhaustive_search(chan, budget, s.exhaustive_grid, noise);
                const SubsystemChannels sub = partition(chan, ex.config, noise);
                out.rate = info_rate(sub, ex.covariances);
                out.harvested_w = harvested_power(sub, ex.covariances);
                break;
            }
            case Method::DrlPolicy: {
                if (!policy) throw ContractError("run_trial: drl_policy needs a loaded policy");
                const PolicyRollout r = evaluate_policy(*policy, chan, budget, s.rollout_steps);
                out.rate = r.mean_reward;
                out.harvested_w = r.mean_harvested_w;
                break;
            }
        }
        if (!std::isfinite(out.rate) || !std::isfinite(out.harvested_w))
            throw NumericalFailure("non-finite trial result");
    } catch (const NumericalFailure& e) {
        out = TrialOutcome{0.0, 0.0, true, e.what()};
    } catch (const DomainError& e) {
        out = TrialOutcome{0.0, 0.0, true, e.what()};
    }
    return out;
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

int worker_count(int requested, int trials) {
    int w = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    return std::clamp(w, 1, trials);
}

std::vector<TrialOutcome> run_point(const ExperimentScenario& s, double ps_dbm, const PolicyArtifact* policy) {
    std::vector<TrialOutcome> results(static_cast<std::size_t>(s.trials));
    const int workers = worker_count(s.workers, s.trials);
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&]() {
        for (int t = next.fetch_add(1); t < s.trials; t = next.fetch_add(1)) {
            try {
                results[static_cast<std::size_t>(t)] = run_trial(s, ps_dbm, t, policy);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(s.trials);
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

struct Moments {
    double mean = 0.0;
    double std = 0.0;
    int count = 0;
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    m.count = static_cast<int>(v.size());
    if (v.empty()) return m;
    m.mean = pairwise_sum(v) / double(v.size());
    if (v.size() > 1) {
        std::vector<double> dev(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - m.mean) * (v[i] - m.mean);
        m.std = std::sqrt(pairwise_sum(dev) / double(v.size() - 1));
    }
    return m;
}

}  // namespace

MonteCarloResult run_monte_carlo(const ExperimentScenario& scenario, const RunOptions& options) {
    scenario.validate();
    std::unique_ptr<PolicyArtifact> policy;
    if (scenario.method == Method::DrlPolicy) {
        policy = std::make_unique<PolicyArtifact>(PolicyArtifact::load(scenario.policy_path));
        if (policy->m != scenario.channel.m || policy->n != scenario.channel.n)
            throw ContractError("scenario: policy artifact was trained for a different array size");
    }

    MonteCarloResult result;
    for (double ps_dbm : scenario.ps_dbm) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<TrialOutcome> outcomes = run_point(scenario, ps_dbm, policy.get());
        const auto t1 = std::chrono::steady_clock::now();

        std::vector<double> rates;
        std::vector<double> harvested;
        int failures = 0;
        for (const auto& o : outcomes) {
            if (o.failed) {
                ++failures;
                continue;
            }
            rates.push_back(o.rate);
            harvested.push_back(o.harvested_w);
        }
        const Moments r = moments(rates);
        ResultRow row;
        row.method = to_string(scenario.method);
        row.ps_dbm = ps_dbm;
        row.mean_rate = r.mean;
        row.std_rate = r.std;
        row.mean_harvested_w = moments(harvested).mean;
        row.trials = scenario.trials;
        row.failures = failures;
        row.wall_ms = options.timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
        if (failures * 100 > scenario.trials) result.degraded = true;
        result.rows.push_back(row);
        if (options.keep_trials) result.trials.push_back(std::move(outcomes));
    }
    return result;
}

void write_results_csv(std::ostream& os, std::span<const ResultRow> rows) {
    os << "method,ps_dbm,mean_rate,std_rate,mean_harvested_w,trials,wall_ms\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.6g,%.12g,%.12g,%.12g,%d,%.3f\n", r.method.c_str(), r.ps_dbm, r.mean_rate,
                      r.std_rate, r.mean_harvested_w, r.trials, r.wall_ms);
        os << buf;
    }
}

Comparison compare_methods(std::span<const ExperimentScenario> scenarios, const RunOptions& options) {
    if (scenarios.size() < 2) throw ContractError("compare_methods: need at least two scenarios");
    const ExperimentScenario& ref = scenarios.front();
    for (const auto& s : scenarios) {
        if (s.ps_dbm != ref.ps_dbm) throw ContractError("compare_methods: scenarios use different power sweeps");
        if (s.trials != ref.trials || s.seed != ref.seed)
            throw ContractError("compare_methods: scenarios must share trials and master seed");
        if (s.channel.m != ref.channel.m || s.channel.n != ref.channel.n ||
            s.channel.rician_k_db != ref.channel.rician_k_db ||
            s.channel.si_attenuation_db != ref.channel.si_attenuation_db)
            throw ContractError("compare_methods: scenarios must share the channel model");
    }

    RunOptions keep = options;
    keep.keep_trials = true;
    std::vector<MonteCarloResult> runs;
    Comparison out;
    for (const auto& s : scenarios) {
        runs.push_back(run_monte_carlo(s, keep));
        out.degraded = out.degraded || runs.back().degraded;
        out.rows.insert(out.rows.end(), runs.back().rows.begin(), runs.back().rows.end());
    }

    for (std::size_t b = 1; b < runs.size(); ++b) {
        for (std::size_t p = 0; p < ref.ps_dbm.size(); ++p) {
            const auto& ta = runs[0].trials[p];
            const auto& tb = runs[b].trials[p];
            std::vector<double> diff;
            for (std::size_t t = 0; t < ta.size(); ++t)
                if (!ta[t].failed && !tb[t].failed) diff.push_back(ta[t].rate - tb[t].rate);
            const Moments d = moments(diff);
            ComparisonRow row;
            row.ps_dbm = ref.ps_dbm[p];
            row.method_a = to_string(scenarios[0].method);
            row.method_b = to_string(scenarios[b].method);
            row.mean_gain = d.mean;
            row.paired_se = d.count > 0 ? d.std / std::sqrt(double(d.count)) : 0.0;
            row.pairs = d.count;
            out.gains.push_back(row);
        }
    }
    return out;
}

void write_comparison_csv(std::ostream& os, std::span<const ComparisonRow> rows) {
    os << "ps_dbm,method_a,method_b,mean_gain,paired_se,pairs\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6g,%s,%s,%.12g,%.12g,%d\n", r.ps_dbm, r.method_a.c_str(),
                      r.method_b.c_str(), r.mean_gain, r.paired_se, r.pairs);
        os << buf;
    }
}

}  // namespace fdswipt
