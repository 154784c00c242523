// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------
//
// Command-line front end: simulate, compare, allocate, precode, train,
// eval-policy.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdswipt/config.hpp"

namespace fs = std::filesystem;
using namespace fdswipt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitDegraded = 4;

struct GlobalFlags {
    std::uint64_t seed = 0;
    std::string config_path;
    std::string out_dir;
    int trials = 0;
    bool quiet = false;
};

struct SweepFlags {
    std::string method;
    std::vector<double> ps_dbm;
    int m = 0;
    int n = 0;
    std::string mixing;
    int workers = -1;
    bool timing = false;
};

class Output {
public:
    explicit Output(bool quiet) : quiet_(quiet) {}
    template <typename... Args>
    void info(const char* fmt, Args... args) const {
        if (!quiet_) std::fprintf(stdout, fmt, args...);
    }

private:
    bool quiet_;
};

std::string join_path(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    return os;
}

RunConfig resolve(const GlobalFlags& g, CLI::App& app, const SweepFlags* sweep, const std::string& policy_path = {}) {
    RunConfig c = g.config_path.empty() ? RunConfig{} : load_run_config(g.config_path);
    if (app.get_option("--seed")->count()) {
        c.scenario.seed = g.seed;
        c.channel_seed = g.seed;
    }
    if (app.get_option("--out")->count()) c.out_dir = g.out_dir;
    if (app.get_option("--trials")->count()) c.scenario.trials = g.trials;
    if (sweep) {
        if (!sweep->method.empty()) c.scenario.method = parse_method(sweep->method);
        if (!sweep->ps_dbm.empty()) c.scenario.ps_dbm = sweep->ps_dbm;
        if (sweep->m > 0) c.scenario.channel.m = sweep->m;
        if (sweep->n > 0) c.scenario.channel.n = sweep->n;
        if (sweep->mixing == "raw") c.scenario.mixing = EnergyMixing::Raw;
        if (sweep->mixing == "normalized") c.scenario.mixing = EnergyMixing::Normalized;
        if (sweep->workers >= 0) c.scenario.workers = sweep->workers;
        if (sweep->timing) c.timing = true;
    }
    if (!policy_path.empty()) c.scenario.policy_path = policy_path;
    c.validate();
    return c;
}

void write_sidecar(const std::string& csv_path, const RunConfig& c, std::span<const ResultRow> rows, bool degraded) {
    nlohmann::json side = nlohmann::json::parse(to_json_text(c));
    nlohmann::json report = nlohmann::json::array();
    for (const auto& r : rows)
        report.push_back({{"method", r.method}, {"ps_dbm", r.ps_dbm}, {"trials", r.trials}, {"failures", r.failures}});
    side["run"] = {{"rows", report},
                   {"degraded", degraded},
                   {"note", "desk-scale Monte-Carlo; wall_ms is 0 unless output.timing is set"}};
    std::ofstream os = open_out(csv_path + ".config.json");
    os << side.dump(2) << "\n";
}

void add_sweep_flags(CLI::App* cmd, SweepFlags& f, bool with_method) {
    if (with_method) cmd->add_option("--method", f.method, "antenna_split_sca | antenna_split_equal_power | "
                                                           "time_switching | drl_policy | exhaustive");
    cmd->add_option("--ps-dbm", f.ps_dbm, "source power sweep in dBm")->delimiter(',');
    cmd->add_option("--m", f.m, "antennas at P1");
    cmd->add_option("--n", f.n, "antennas at P2");
    cmd->add_option("--mixing", f.mixing, "normalized | raw")->check(CLI::IsMember({"normalized", "raw"}));
    cmd->add_option("--workers", f.workers, "worker threads, 0 = all cores");
    cmd->add_flag("--timing", f.timing, "record wall_ms (makes the CSV non-reproducible)");
}

int cmd_simulate(const RunConfig& c, const Output& out) {
    ensure_dir(c.out_dir);
    RunOptions opts;
    opts.timing = c.timing;
    const MonteCarloResult r = run_monte_carlo(c.scenario, opts);
    const std::string path = join_path(c.out_dir, to_string(c.scenario.method) + ".csv");
    {
        std::ofstream os = open_out(path);
        write_results_csv(os, r.rows);
    }
    write_sidecar(path, c, r.rows, r.degraded);
    for (const auto& row : r.rows)
        out.info("%-26s %6.1f dBm  rate %10.4f +- %8.4f  harvested %.4g W  failures %d\n", row.method.c_str(),
                 row.ps_dbm, row.mean_rate, row.std_rate, row.mean_harvested_w, row.failures);
    out.info("wrote %s\n", path.c_str());
    return r.degraded ? kExitDegraded : kExitOk;
}

int cmd_compare(const RunConfig& c, const Output& out) {
    ensure_dir(c.out_dir);
    std::vector<ExperimentScenario> scenarios;
    for (Method m : c.compare) {
        ExperimentScenario s = c.scenario;
        s.method = m;
        scenarios.push_back(s);
    }
    RunOptions opts;
    opts.timing = c.timing;
    const Comparison cmp = compare_methods(scenarios, opts);
    const std::string rows_path = join_path(c.out_dir, "compare_rows.csv");
    const std::string gains_path = join_path(c.out_dir, "compare_gains.csv");
    {
        std::ofstream os = open_out(rows_path);
        write_results_csv(os, cmp.rows);
    }
    {
        std::ofstream os = open_out(gains_path);
        write_comparison_csv(os, cmp.gains);
    }
    write_sidecar(rows_path, c, cmp.rows, cmp.degraded);
    for (const auto& g : cmp.gains)
        out.info("%6.1f dBm  %s - %s = %+.4f (se %.4f, %d pairs)\n", g.ps_dbm, g.method_a.c_str(), g.method_b.c_str(),
                 g.mean_gain, g.paired_se, g.pairs);
    out.info("wrote %s and %s\n", rows_path.c_str(), gains_path.c_str());
    return cmp.degraded ? kExitDegraded : kExitOk;
}

int cmd_allocate(const RunConfig& c, const Output& out) {
    const ChannelRealization chan = sample_channel(c.scenario.channel, c.channel_seed);
    const double ps = dbm_to_watts(c.single_ps_dbm);
    const AllocationResult r = allocate_antennas_traced(chan, ps, ps, c.scenario.seed_rule);
    out.info("seed pair: p1=%d p2=%d\n", r.seed_p1 + 1, r.seed_p2 + 1);
    for (std::size_t i = 0; i < r.steps.size(); ++i)
        out.info("step %zu: estimate %.6g W, moved %s antenna %d\n", i + 1, r.steps[i].eh_power_estimate,
                 r.steps[i].moved_p1 >= 0 ? "p1" : "p2",
                 (r.steps[i].moved_p1 >= 0 ? r.steps[i].moved_p1 : r.steps[i].moved_p2) + 1);
    std::cout << to_string(r.config) << "\n";
    return kExitOk;
}

int cmd_precode(const RunConfig& c, const Output& out) {
    ensure_dir(c.out_dir);
    const ChannelRealization chan = sample_channel(c.scenario.channel, c.channel_seed);
    const double ps = dbm_to_watts(c.single_ps_dbm);
    const PowerBudget budget = PowerBudget::at_source_power(ps, c.scenario.alpha, c.scenario.mixing);
    const SubsystemConfig cfg = allocate_antennas(chan, ps, budget.pq, c.scenario.seed_rule);
    const SubsystemChannels sub = partition(chan, cfg, c.scenario.channel.noise_power());
    const ScaResult r = sca_precoding(sub, budget, c.scenario.sca);
    const std::string path = join_path(c.out_dir, "sca_trace.csv");
    {
        std::ofstream os = open_out(path);
        r.trace.write_csv(os);
    }
    out.info("%s\n", to_string(cfg).c_str());
    out.info("rate %.6f bps/Hz  harvested %.6g W  objective %.6g  outer iterations %zu\n", r.rate, r.harvested_watts,
             r.objective, r.trace.iterations.size());
    out.info("wrote %s\n", path.c_str());
    return kExitOk;
}

int cmd_train(const RunConfig& c, const Output& out, std::uint64_t seed) {
    ensure_dir(c.out_dir);
    const PowerBudget budget =
        PowerBudget::at_source_power(dbm_to_watts(c.train_ps_dbm), c.scenario.alpha, c.scenario.mixing);
    TrainOptions opts;
    opts.checkpoint_path = join_path(c.out_dir, "policy.checkpoint.txt");
    if (c.train_frozen_channel) opts.frozen_channel = sample_channel(c.scenario.channel, c.channel_seed);
    const TrainResult r = train(c.scenario.channel, budget, c.agent, seed, opts);
    const std::string policy_path = join_path(c.out_dir, "policy.txt");
    const std::string curve_path = join_path(c.out_dir, "training_curve.csv");
    r.policy.save(policy_path);
    {
        std::ofstream os = open_out(curve_path);
        write_training_curve(os, r.curve);
    }
    {
        std::ofstream os = open_out(policy_path + ".config.json");
        os << to_json_text(c);
    }
    if (!r.curve.empty())
        out.info("final episode mean reward %.4f bps/Hz\n", r.curve.back().mean_reward);
    out.info("wrote %s and %s\n", policy_path.c_str(), curve_path.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fdswipt: full-duplex MIMO energy harvesting / information transfer experiments"};
    app.require_subcommand(1);
    GlobalFlags g;
    app.add_option("--seed", g.seed, "master seed (trials, training, single-channel commands)");
    app.add_option("--config", g.config_path, "JSON configuration file");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--trials", g.trials, "Monte-Carlo trials per power point");
    app.add_flag("--quiet", g.quiet, "suppress progress output");

    SweepFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo sweep of one method");
    add_sweep_flags(simulate, sim_flags, true);

    SweepFlags cmp_flags;
    std::vector<std::string> cmp_methods;
    auto* compare = app.add_subcommand("compare", "paired comparison of methods on shared channels");
    add_sweep_flags(compare, cmp_flags, false);
    compare->add_option("--methods", cmp_methods, "methods, first is compared against the others")->delimiter(',');

    double single_dbm = 0.0;
    auto* allocate = app.add_subcommand("allocate", "greedy antenna allocation for one channel");
    allocate->add_option("--ps-dbm", single_dbm, "source power in dBm");
    auto* precode = app.add_subcommand("precode", "allocation plus SCA precoding for one channel, writes the trace");
    precode->add_option("--ps-dbm", single_dbm, "source power in dBm");

    int episodes = 0;
    int steps = 0;
    bool frozen = false;
    auto* train_cmd = app.add_subcommand("train", "train the DDPG/DDQN agent");
    train_cmd->add_option("--episodes", episodes, "training episodes");
    train_cmd->add_option("--steps", steps, "steps per episode");
    train_cmd->add_option("--ps-dbm", single_dbm, "source power in dBm");
    train_cmd->add_flag("--frozen-channel", frozen, "reuse one channel (config channel.seed) for every episode");

    SweepFlags eval_flags;
    std::string policy_path;
    auto* eval = app.add_subcommand("eval-policy", "roll out a trained policy into result rows");
    add_sweep_flags(eval, eval_flags, false);
    eval->add_option("--policy", policy_path, "policy artifact")->required();

    for (auto* sub : {simulate, compare, allocate, precode, train_cmd, eval}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const Output out(g.quiet);
    try {
        if (simulate->parsed()) return cmd_simulate(resolve(g, app, &sim_flags), out);
        if (compare->parsed()) {
            RunConfig c = resolve(g, app, &cmp_flags);
            if (!cmp_methods.empty()) {
                c.compare.clear();
                for (const auto& m : cmp_methods) c.compare.push_back(parse_method(m));
                c.validate();
            }
            return cmd_compare(c, out);
        }
        if (allocate->parsed() || precode->parsed()) {
            RunConfig c = resolve(g, app, nullptr);
            const auto* cmd = allocate->parsed() ? allocate : precode;
            if (cmd->get_option("--ps-dbm")->count()) c.single_ps_dbm = single_dbm;
            return allocate->parsed() ? cmd_allocate(c, out) : cmd_precode(c, out);
        }
        if (train_cmd->parsed()) {
            RunConfig c = resolve(g, app, nullptr);
            if (episodes > 0) c.agent.episodes = episodes;
            if (steps > 0) c.agent.steps_per_episode = steps;
            if (train_cmd->get_option("--ps-dbm")->count()) c.train_ps_dbm = single_dbm;
            if (frozen) c.train_frozen_channel = true;
            c.validate();
            return cmd_train(c, out, c.scenario.seed);
        }
        if (eval->parsed()) {
            eval_flags.method = to_string(Method::DrlPolicy);
            return cmd_simulate(resolve(g, app, &eval_flags, policy_path), out);
        }
    } catch (const NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const ContractError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitOk;
}
