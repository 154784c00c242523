// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. `acceptance` runs every criterion, `acceptance <k>` runs
// criterion k only. Each criterion prints one PASS/FAIL line; the exit code is
// nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fdswipt/allocation.hpp"
#include "fdswipt/drl.hpp"
#include "fdswipt/harness.hpp"
#include "fdswipt/mlp.hpp"
#include "fdswipt/precoding.hpp"
#include "support.hpp"

using namespace fdswipt;
using namespace fdswipt::testing;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

/// Random channel, random split of it, random covariances at a random source power.
struct Instance {
    SubsystemChannels sub;
    CovariancePair qp;
    double ps = 1.0;
};

Instance random_instance(std::mt19937_64& rng, int max_antennas) {
    ChannelParams p;
    p.m = uniform_int(rng, 2, max_antennas);
    p.n = uniform_int(rng, 2, max_antennas);
    const auto chan = sample_channel(p, rng());
    const auto configs = enumerate_configs(p.m, p.n);
    const auto& cfg = configs[static_cast<std::size_t>(uniform_int(rng, 0, int(configs.size()) - 1))];
    Instance in;
    in.ps = dbm_to_watts(std::uniform_real_distribution<>(20.0, 50.0)(rng));
    in.sub = partition(chan, cfg, p.noise_power());
    const auto r1 = uniform_int(rng, 1, int(in.sub.m_eh()));
    const auto r2 = uniform_int(rng, 1, int(in.sub.n_it()));
    in.qp = {PsdMatrix::from(random_psd(in.sub.m_eh(), rng, in.ps, r1)),
             PsdMatrix::from(random_psd(in.sub.n_it(), rng, in.ps, r2))};
    return in;
}

// ---------------------------------------------------------------- 1

Verdict rate_identity() {
    Stopwatch clock;
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Instance in = random_instance(rng, 4);
        worst = std::max(worst, std::abs(info_rate(in.sub, in.qp) - info_rate_two_logdet(in.sub, in.qp)));
    }
    const double t = clock.seconds();
    return {worst < 1e-9 && t < 10.0, fmt("1000 instances, max |error| %.3g (< 1e-9), %.2f s (< 10 s)", worst, t)};
}

// ---------------------------------------------------------------- 2

Verdict anchor_exactness() {
    std::mt19937_64 rng(102);
    double worst_anchor = 0.0;
    double worst_excess = -1e300;
    int probes = 0;
    for (int k = 0; k < 1000; ++k) {
        const Instance in = random_instance(rng, 4);
        worst_anchor = std::max(worst_anchor, std::abs(linearized_rate(in.sub, in.qp, in.qp.q1) - info_rate(in.sub, in.qp)));
        for (int j = 0; j < 5; ++j) {
            const auto anchor = PsdMatrix::from(
                random_psd(in.sub.m_eh(), rng, in.ps * std::uniform_real_distribution<>(0.0, 1.0)(rng),
                           uniform_int(rng, 1, int(in.sub.m_eh()))));
            worst_excess = std::max(worst_excess, linearized_rate(in.sub, in.qp, anchor) - info_rate(in.sub, in.qp));
            ++probes;
        }
    }
    return {worst_anchor < 1e-9 && worst_excess <= 1e-9,
            fmt("anchor max |error| %.3g (< 1e-9); %d off-anchor probes, max surrogate - rate %.3g (<= 1e-9)",
                worst_anchor, probes, worst_excess)};
}

// ---------------------------------------------------------------- 3

double solver_gradient_error(std::mt19937_64& rng) {
    // Interior point at a random power level and the default noise floor;
    // directional derivative along a random Hermitian direction.
    Instance in = random_instance(rng, 4);
    const auto m_eh = in.sub.m_eh();
    const auto n_it = in.sub.n_it();
    in.qp = {PsdMatrix::from(random_psd(m_eh, rng, 0.5 * in.ps) + 0.1 * in.ps / m_eh * CMatrix::Identity(m_eh, m_eh)),
             PsdMatrix::from(random_psd(n_it, rng, 0.5 * in.ps) + 0.1 * in.ps / n_it * CMatrix::Identity(n_it, n_it))};
    const auto anchor = PsdMatrix::from(random_psd(m_eh, rng, in.ps));
    PowerBudget b = PowerBudget::at_source_power(in.ps);
    b.mixing = (rng() & 1) ? EnergyMixing::Raw : EnergyMixing::Normalized;
    const auto g = surrogate_gradient(in.sub, in.qp, anchor, b);
    const CMatrix d1 = random_hermitian(m_eh, rng) * (0.05 * in.ps / m_eh);
    const CMatrix d2 = random_hermitian(n_it, rng) * (0.05 * in.ps / n_it);
    auto f = [&](double t) {
        return surrogate_objective(in.sub, {PsdMatrix::from(in.qp.q1.matrix() + t * d1), PsdMatrix::from(in.qp.q2.matrix() + t * d2)},
                                   anchor, b);
    };
    const double h = 1e-4;
    const double numeric = (f(h) - f(-h)) / (2 * h);
    const double analytic = (g.q1.adjoint() * d1).trace().real() + (g.q2.adjoint() * d2).trace().real();
    return std::abs(numeric - analytic) / std::max({std::abs(numeric), std::abs(analytic), 1e-300});
}

double mlp_gradient_error(std::mt19937_64& rng) {
    const int in = uniform_int(rng, 1, 5);
    const int out = uniform_int(rng, 1, 4);
    std::vector<int> widths{in};
    std::vector<Activation> acts;
    const int hidden = uniform_int(rng, 1, 3);
    for (int k = 0; k < hidden; ++k) {
        widths.push_back(uniform_int(rng, 2, 12));
        acts.push_back(k % 2 ? Activation::Sigmoid : Activation::Relu);
    }
    widths.push_back(out);
    acts.push_back((rng() & 1) ? Activation::Sigmoid : Activation::Linear);
    Mlp net(widths, acts, rng);

    RMatrix x(in, 3);
    RMatrix c(out, 3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& v : x.reshaped()) v = gauss(rng);
    for (auto& v : c.reshaped()) v = gauss(rng);
    Mlp::Tape tape;
    net.forward(x, tape);
    Mlp::Gradients grads;
    net.backward(tape, c, &grads);
    std::vector<double> analytic;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        for (Eigen::Index i = 0; i < grads.weights[l].rows(); ++i)
            for (Eigen::Index j = 0; j < grads.weights[l].cols(); ++j) analytic.push_back(grads.weights[l](i, j));
        for (Eigen::Index i = 0; i < grads.biases[l].size(); ++i) analytic.push_back(grads.biases[l](i));
    }
    const std::vector<double> theta = net.parameters();
    auto loss = [&](const std::vector<double>& p) {
        Mlp probe = net;
        probe.set_parameters(p);
        return (probe.forward(x).array() * c.array()).sum();
    };
    double diff2 = 0.0;
    double norm2 = 0.0;
    const double h = 1e-6;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        auto up = theta;
        auto dn = theta;
        up[k] += h;
        dn[k] -= h;
        const double numeric = (loss(up) - loss(dn)) / (2 * h);
        diff2 += (numeric - analytic[k]) * (numeric - analytic[k]);
        norm2 += analytic[k] * analytic[k] + numeric * numeric;
    }
    return norm2 > 0 ? std::sqrt(diff2) / std::sqrt(norm2) : 0.0;
}

Verdict gradient_checks() {
    Stopwatch clock;
    std::mt19937_64 rng(103);
    double solver = 0.0;
    for (int k = 0; k < 200; ++k) solver = std::max(solver, solver_gradient_error(rng));
    double mlp = 0.0;
    for (int k = 0; k < 200; ++k) mlp = std::max(mlp, mlp_gradient_error(rng));
    const double t = clock.seconds();
    return {solver < 1e-4 && mlp < 1e-5 && t < 30.0,
            fmt("solver max rel error %.3g (< 1e-4, 200 fixtures); Mlp max rel error %.3g (< 1e-5, 200 nets); %.1f s (< 30 s)",
                solver, mlp, t)};
}

// ---------------------------------------------------------------- 4

Verdict oracle_equivalence() {
    Stopwatch clock;
    ChannelParams p;
    p.m = 2;
    p.n = 2;
    const auto budget = PowerBudget::at_source_power(dbm_to_watts(30));
    double worst_deficit = 0.0;
    double best_surplus = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto chan = sample_channel(p, 4000 + seed);
        const auto ex = exhaustive_search(chan, budget, 8, p.noise_power());
        const auto sub = partition(chan, ex.config, p.noise_power());
        const double sca = sca_precoding(sub, budget).objective;
        const double rel = (sca - ex.objective) / std::abs(ex.objective);
        worst_deficit = std::max(worst_deficit, -rel);
        best_surplus = std::max(best_surplus, rel);
    }
    const double t = clock.seconds();
    return {worst_deficit <= 0.02 && t < 120.0,
            fmt("20 instances at 30 dBm, grid 8: worst SCA shortfall %.3g%% (<= 2%%), largest SCA excess %.3g%%, %.1f s",
                100 * worst_deficit, 100 * best_surplus, t)};
}

// ---------------------------------------------------------------- 5

Verdict sca_monotone() {
    std::mt19937_64 rng(105);
    double worst_drop = 0.0;
    int anchors = 0;
    for (int k = 0; k < 100; ++k) {
        ChannelParams p;
        p.m = uniform_int(rng, 2, 6);
        p.n = uniform_int(rng, 2, 6);
        const auto chan = sample_channel(p, rng());
        const auto b = PowerBudget::at_source_power(dbm_to_watts(std::uniform_real_distribution<>(20.0, 50.0)(rng)));
        const auto sub = partition(chan, allocate_antennas(chan, b.ps, b.pq), p.noise_power());
        const auto r = sca_precoding(sub, b);
        double prev = r.trace.initial_objective;
        for (const auto& it : r.trace.iterations) {
            worst_drop = std::max(worst_drop, prev - it.objective);
            prev = it.objective;
            ++anchors;
        }
    }
    return {worst_drop <= 1e-7, fmt("100 instances up to 6x6, %d anchors, largest objective drop %.3g (<= 1e-7)",
                                    anchors, worst_drop)};
}

// ---------------------------------------------------------------- 6, 7

ExperimentScenario paired_scenario(Method m, int antennas, std::vector<double> sweep) {
    ExperimentScenario s;
    s.method = m;
    s.channel.m = antennas;
    s.channel.n = antennas;
    s.ps_dbm = std::move(sweep);
    s.trials = 10000;
    s.seed = 2024;
    return s;
}

Verdict sca_beats_equal_power() {
    Stopwatch clock;
    const std::vector<double> sweep{20, 25, 30, 35, 40, 45, 50};
    const std::vector<ExperimentScenario> pair{paired_scenario(Method::AntennaSplitSca, 4, sweep),
                                               paired_scenario(Method::AntennaSplitEqualPower, 4, sweep)};
    const Comparison c = compare_methods(pair);
    bool ok = !c.degraded;
    std::string points;
    for (std::size_t k = 0; k < c.gains.size(); ++k) {
        const auto& g = c.gains[k];
        const double sca = c.rows[k].mean_rate;
        const double eq = c.rows[sweep.size() + k].mean_rate;
        ok = ok && sca >= eq;
        if (g.ps_dbm <= 40.0) ok = ok && g.mean_gain > 0.0;
        points += fmt(" %g:%+.2f", g.ps_dbm, g.mean_gain);
    }
    const double t = clock.seconds();
    ok = ok && t < 300.0;
    return {ok, fmt("M=N=4, 10^4 paired trials, gain SCA - equal power [dBm:bps/Hz]%s; %.0f s (< 300 s)",
                    points.c_str(), t)};
}

Verdict split_beats_time_switching() {
    const std::vector<double> sweep{20, 25, 30, 35, 40};
    const std::vector<ExperimentScenario> pair{paired_scenario(Method::AntennaSplitSca, 4, sweep),
                                               paired_scenario(Method::TimeSwitching, 4, sweep)};
    const Comparison c = compare_methods(pair);
    bool ok = !c.degraded;
    std::string points;
    for (const auto& g : c.gains) {
        ok = ok && g.mean_gain > 0.0 && g.mean_gain >= 3.0 * g.paired_se;
        points += fmt(" %g:%+.2f(se %.2f)", g.ps_dbm, g.mean_gain, g.paired_se);
    }
    return {ok, fmt("M=N=4, 10^4 paired trials, gain split - TS(0.5) [dBm:bps/Hz]%s; needs gain > 0 and >= 3 se",
                    points.c_str())};
}

// ---------------------------------------------------------------- 8

Verdict high_power_trend() {
    const std::vector<double> sweep{20, 25, 30, 35, 40, 45, 50, 55, 60};
    auto at = [&](const MonteCarloResult& r, double dbm) {
        for (const auto& row : r.rows)
            if (row.ps_dbm == dbm) return row.mean_rate;
        return std::nan("");
    };
    bool any_mode = false;
    std::string detail;
    for (EnergyMixing mix : {EnergyMixing::Normalized, EnergyMixing::Raw}) {
        ExperimentScenario two = paired_scenario(Method::AntennaSplitSca, 2, sweep);
        ExperimentScenario four = paired_scenario(Method::AntennaSplitSca, 4, sweep);
        two.mixing = four.mixing = mix;
        two.channel.si_attenuation_db = four.channel.si_attenuation_db = 0.0;
        const auto r2 = run_monte_carlo(two);
        const auto r4 = run_monte_carlo(four);
        const bool drop = at(r2, 55) < at(r2, 35);
        bool rising = true;
        for (std::size_t k = 1; k < r4.rows.size(); ++k) rising = rising && r4.rows[k].mean_rate >= r4.rows[k - 1].mean_rate;
        any_mode = any_mode || (drop && rising && !r2.degraded && !r4.degraded);
        detail += fmt("%s: 2x2 %.2f@35 -> %.2f@55 (%s), 4x4 %.2f@20 .. %.2f@60 (%s); ",
                      mix == EnergyMixing::Raw ? "raw" : "normalized", at(r2, 35), at(r2, 55),
                      drop ? "drops" : "no drop", r4.rows.front().mean_rate, r4.rows.back().mean_rate,
                      rising ? "non-decreasing" : "decreasing somewhere");
    }
    return {any_mode, detail + "10^4 trials, SI 0 dB; needs both halves in one mixing mode"};
}

// ---------------------------------------------------------------- 9

Verdict drl_learning() {
    Stopwatch clock;
    ChannelParams p;
    p.m = 2;
    p.n = 2;
    const auto chan = sample_channel(p, 7);
    const auto budget = PowerBudget::at_source_power(dbm_to_watts(30));
    TrainOptions opt;
    opt.frozen_channel = chan;

    // Determinism: a short run repeated bit for bit.
    AgentHyperparams quick;
    quick.episodes = 3;
    quick.steps_per_episode = 40;
    const auto a = train(p, budget, quick, 42, opt);
    const auto b = train(p, budget, quick, 42, opt);
    bool same = a.policy.actor.parameters() == b.policy.actor.parameters() &&
                a.policy.qnet.parameters() == b.policy.qnet.parameters();
    for (std::size_t k = 0; k < a.curve.size(); ++k) same = same && a.curve[k].mean_reward == b.curve[k].mean_reward;

    const AgentHyperparams hp;  // 300 episodes x 100 steps
    const auto r = train(p, budget, hp, 42, opt);
    const std::size_t e = r.curve.size();
    double first = 0.0;
    double last = 0.0;
    for (std::size_t k = 0; k < 50; ++k) {
        first += r.curve[k].mean_reward / 50.0;
        last += r.curve[e - 1 - k].mean_reward / 50.0;
    }
    const double policy = evaluate_policy(r.policy, chan, budget, hp.steps_per_episode).mean_reward;
    const auto sub = partition(chan, allocate_antennas(chan, budget.ps, budget.pq), p.noise_power());
    const double baseline = info_rate(sub, equal_power(sub, budget));
    const double t = clock.seconds();
    return {same && e == 300 && last >= first && policy >= baseline && t < 600.0,
            fmt("deterministic rerun %s; %zu episodes; mean reward first 50 %.3f, last 50 %.3f; greedy policy %.3f vs "
                "allocation + equal power %.3f bps/Hz; %.0f s (< 600 s)",
                same ? "identical" : "DIFFERS", e, first, last, policy, baseline, t)};
}

// ---------------------------------------------------------------- 10

Verdict rl_updates() {
    std::mt19937_64 rng(110);
    AgentHyperparams hp;
    hp.actor_critic_hidden = {16, 8};
    hp.q_hidden = {8, 8};
    auto nets = AgentNetworks::create(8, 4, hp, rng);
    auto other = AgentNetworks::create(8, 4, hp, rng);

    // Polyak with τ = 1 copies exactly.
    Mlp target = other.critic;
    polyak_update(target, nets.critic, 1.0);
    const bool polyak = target.parameters() == nets.critic.parameters();

    // ζ = 0: both TD targets are the rewards.
    std::vector<Transition> batch;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FeatureScaler scaler;
    for (int k = 0; k < 16; ++k) {
        Transition t;
        t.state = {0.1 + u(rng), 10 * u(rng)};
        t.next = {0.1 + u(rng), 10 * u(rng)};
        t.reward = 5 * u(rng);
        t.action.config = k % 4;
        for (int j = 0; j < 8; ++j) t.action.precoding.push_back(u(rng));
        scaler.observe(t.state);
        scaler.observe(t.next);
        batch.push_back(t);
    }
    const auto y1 = ddpg_targets(batch, scaler, nets, 0.0);
    const auto y2 = ddqn_targets(batch, scaler, nets.qnet, nets.qnet_target, 0.0);
    bool zero_discount = true;
    for (int k = 0; k < 16; ++k)
        zero_discount = zero_discount && y1(k) == batch[std::size_t(k)].reward && y2(k) == batch[std::size_t(k)].reward;

    // Decoupling: online Q(s', ·) = (1, 5), target Q(s', ·) = (10, 0). The target
    // picks action 0, the online network evaluates it: y = r + ζ·1.
    auto constant = [](std::vector<double> bias) {
        std::vector<double> flat(2 * bias.size(), 0.0);
        flat.insert(flat.end(), bias.begin(), bias.end());
        return Mlp::from_parts({2, int(bias.size())}, {Activation::Linear}, flat);
    };
    std::vector<Transition> pair(batch.begin(), batch.begin() + 2);
    for (auto& t : pair) t.action.config %= 2;
    const auto y = ddqn_targets(pair, scaler, constant({1.0, 5.0}), constant({10.0, 0.0}), 0.9);
    const bool decoupled = std::abs(y(0) - (pair[0].reward + 0.9)) < 1e-12 && std::abs(y(1) - (pair[1].reward + 0.9)) < 1e-12;

    return {polyak && zero_discount && decoupled,
            fmt("Polyak tau=1 exact copy: %s; zeta=0 targets equal rewards: %s; DDQN target-selects/online-evaluates: %s",
                polyak ? "yes" : "no", zero_discount ? "yes" : "no", decoupled ? "yes" : "no")};
}

// ---------------------------------------------------------------- 11

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Verdict reproducibility() {
    const fs::path root = fs::temp_directory_path() / ("fdswipt_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    struct Run {
        std::string method;
        std::string extra;
    };
    const std::vector<Run> runs{{"antenna_split_sca", "--m 4 --n 4 --trials 200"},
                                {"antenna_split_equal_power", "--m 3 --n 2 --trials 500"},
                                {"time_switching", "--m 4 --n 4 --trials 500"},
                                {"exhaustive", "--m 2 --n 2 --trials 20"}};
    bool ok = true;
    int compared = 0;
    for (const auto& run : runs) {
        std::string first;
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path dir = root / (run.method + std::to_string(rep));
            const std::string cmd = std::string(FDSWIPT_CLI_PATH) + " simulate --quiet --seed 77 --method " + run.method +
                                    " --ps-dbm 20,35,50 " + run.extra + (rep ? " --workers 3" : " --workers 1") +
                                    " --out " + dir.string();
            if (std::system(cmd.c_str()) != 0) {
                ok = false;
                continue;
            }
            const std::string csv = slurp(dir / (run.method + ".csv"));
            if (rep == 0)
                first = csv;
            else
                ok = ok && !csv.empty() && csv == first;
        }
        ++compared;
    }
    fs::remove_all(root);
    return {ok, fmt("%d simulate invocations each run twice (1 vs 3 workers), CSVs byte-identical: %s", compared,
                    ok ? "yes" : "no")};
}

struct Criterion {
    const char* name;
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {"rate identity (whitened vs two log-det)", rate_identity},
        {"linearization anchor and under-estimator", anchor_exactness},
        {"gradient checks (solver, Mlp)", gradient_checks},
        {"SCA vs exhaustive oracle (2x2)", oracle_equivalence},
        {"SCA anchor monotonicity", sca_monotone},
        {"SCA >= equal power (4x4 sweep)", sca_beats_equal_power},
        {"antenna split > time switching (4x4)", split_beats_time_switching},
        {"high-power trend (2x2 drops, 4x4 rises)", high_power_trend},
        {"DRL determinism and learning (frozen 2x2)", drl_learning},
        {"RL update units (Polyak, TD target, DDQN)", rl_updates},
        {"simulate reproducibility", reproducibility},
    };
    std::vector<int> selected;
    if (argc > 1) {
        for (int k = 1; k < argc; ++k) {
            const int idx = std::atoi(argv[k]);
            if (idx < 1 || idx > int(criteria.size())) {
                std::fprintf(stderr, "usage: %s [criterion 1..%zu ...]\n", argv[0], criteria.size());
                return 2;
            }
            selected.push_back(idx);
        }
    } else {
        for (int k = 1; k <= int(criteria.size()); ++k) selected.push_back(k);
    }

    int failed = 0;
    for (int idx : selected) {
        const Criterion& c = criteria[std::size_t(idx - 1)];
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %2d %s  %s: %s\n", idx, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str());
        std::fflush(stdout);
        if (!v.pass) ++failed;
    }
    return failed ? 1 : 0;
}
