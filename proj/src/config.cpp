// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#include "fdswipt/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fdswipt {

using nlohmann::json;

namespace {

std::string mixing_name(EnergyMixing m) { return m == EnergyMixing::Raw ? "raw" : "normalized"; }
std::string rule_name(SeedPairRule r) { return r == SeedPairRule::MaxGain ? "max_gain" : "min_gain"; }

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) throw ConfigError("config: unknown key '" + where + "." + k + "'");
}

template <typename T>
void read(const json& obj, const char* key, T& target, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        target = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value for '" + where + "." + key + "': " + e.what());
    }
}

}  // namespace

void RunConfig::validate() const {
    try {
        scenario.validate();
        agent.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const ContractError& e) {
        throw ConfigError(e.what());
    }
    if (compare.size() < 2) throw ConfigError("config: compare needs at least two methods");
    if (!std::isfinite(train_ps_dbm) || !std::isfinite(single_ps_dbm))
        throw ConfigError("config: power levels must be finite");
}

std::string to_json_text(const RunConfig& c) {
    const ExperimentScenario& s = c.scenario;
    json j;
    j["method"] = to_string(s.method);
    j["channel"] = {{"m", s.channel.m},
                    {"n", s.channel.n},
                    {"rician_k_db", s.channel.rician_k_db},
                    {"si_attenuation_db", s.channel.si_attenuation_db},
                    {"noise_psd_dbm_hz", s.channel.noise_psd_dbm_hz},
                    {"bandwidth_hz", s.channel.bandwidth_hz},
                    {"seed", c.channel_seed}};
    j["budget"] = {{"alpha", s.alpha}, {"mixing", mixing_name(s.mixing)}, {"ps_dbm", c.single_ps_dbm}};
    j["sweep"] = {{"ps_dbm", s.ps_dbm}, {"trials", s.trials}, {"seed", s.seed}, {"workers", s.workers}};
    j["time_switching"] = {{"tau", s.ts_tau}};
    j["allocation"] = {{"seed_pair", rule_name(s.seed_rule)}};
    j["sca"] = {{"outer_tol", s.sca.outer_tol},
                {"max_outer", s.sca.max_outer},
                {"inner_step", s.sca.inner_step},
                {"max_inner", s.sca.max_inner},
                {"inner_tol", s.sca.inner_tol}};
    j["exhaustive"] = {{"grid", s.exhaustive_grid}};
    std::vector<std::string> methods;
    for (Method m : c.compare) methods.push_back(to_string(m));
    j["compare"] = {{"methods", methods}};
    const AgentHyperparams& a = c.agent;
    j["drl"] = {{"policy", s.policy_path},
                {"rollout_steps", s.rollout_steps},
                {"zeta", a.zeta},
                {"nu", a.nu},
                {"tau_polyak", a.tau_polyak},
                {"batch", a.batch},
                {"target_period", a.target_period},
                {"episodes", a.episodes},
                {"steps_per_episode", a.steps_per_episode},
                {"buffer_capacity", a.buffer_capacity},
                {"epsilon_start", a.epsilon_start},
                {"epsilon_end", a.epsilon_end},
                {"epsilon_decay_fraction", a.epsilon_decay_fraction},
                {"noise_sigma_start", a.noise_sigma_start},
                {"noise_sigma_end", a.noise_sigma_end},
                {"actor_critic_hidden", a.actor_critic_hidden},
                {"q_hidden", a.q_hidden},
                {"train_ps_dbm", c.train_ps_dbm},
                {"frozen_channel", c.train_frozen_channel}};
    j["output"] = {{"dir", c.out_dir}, {"timing", c.timing}};
    return j.dump(2) + "\n";
}

RunConfig parse_run_config(const std::string& text, const RunConfig& defaults) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    reject_unknown(j, "config",
                   {"method", "channel", "budget", "sweep", "time_switching", "allocation", "sca", "exhaustive",
                    "compare", "drl", "output"});
    RunConfig c = defaults;
    ExperimentScenario& s = c.scenario;

    if (j.contains("method")) {
        try {
            s.method = parse_method(j.at("method").get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    if (j.contains("channel")) {
        const json& o = j.at("channel");
        reject_unknown(o, "channel",
                       {"m", "n", "rician_k_db", "si_attenuation_db", "noise_psd_dbm_hz", "bandwidth_hz", "seed"});
        read(o, "m", s.channel.m, "channel");
        read(o, "n", s.channel.n, "channel");
        read(o, "rician_k_db", s.channel.rician_k_db, "channel");
        read(o, "si_attenuation_db", s.channel.si_attenuation_db, "channel");
        read(o, "noise_psd_dbm_hz", s.channel.noise_psd_dbm_hz, "channel");
        read(o, "bandwidth_hz", s.channel.bandwidth_hz, "channel");
        read(o, "seed", c.channel_seed, "channel");
    }
    if (j.contains("budget")) {
        const json& o = j.at("budget");
        reject_unknown(o, "budget", {"alpha", "mixing", "ps_dbm"});
        read(o, "alpha", s.alpha, "budget");
        read(o, "ps_dbm", c.single_ps_dbm, "budget");
        if (o.contains("mixing")) {
            std::string m;
            read(o, "mixing", m, "budget");
            if (m == "normalized")
                s.mixing = EnergyMixing::Normalized;
            else if (m == "raw")
                s.mixing = EnergyMixing::Raw;
            else
                throw ConfigError("config: budget.mixing must be 'normalized' or 'raw'");
        }
    }
    if (j.contains("sweep")) {
        const json& o = j.at("sweep");
        reject_unknown(o, "sweep", {"ps_dbm", "trials", "seed", "workers"});
        read(o, "ps_dbm", s.ps_dbm, "sweep");
        read(o, "trials", s.trials, "sweep");
        read(o, "seed", s.seed, "sweep");
        read(o, "workers", s.workers, "sweep");
    }
    if (j.contains("time_switching")) {
        reject_unknown(j.at("time_switching"), "time_switching", {"tau"});
        read(j.at("time_switching"), "tau", s.ts_tau, "time_switching");
    }
    if (j.contains("allocation")) {
        const json& o = j.at("allocation");
        reject_unknown(o, "allocation", {"seed_pair"});
        if (o.contains("seed_pair")) {
            std::string r;
            read(o, "seed_pair", r, "allocation");
            if (r == "min_gain")
                s.seed_rule = SeedPairRule::MinGain;
            else if (r == "max_gain")
                s.seed_rule = SeedPairRule::MaxGain;
            else
                throw ConfigError("config: allocation.seed_pair must be 'min_gain' or 'max_gain'");
        }
    }
    if (j.contains("sca")) {
        const json& o = j.at("sca");
        reject_unknown(o, "sca", {"outer_tol", "max_outer", "inner_step", "max_inner", "inner_tol"});
        read(o, "outer_tol", s.sca.outer_tol, "sca");
        read(o, "max_outer", s.sca.max_outer, "sca");
        read(o, "inner_step", s.sca.inner_step, "sca");
        read(o, "max_inner", s.sca.max_inner, "sca");
        read(o, "inner_tol", s.sca.inner_tol, "sca");
    }
    if (j.contains("exhaustive")) {
        reject_unknown(j.at("exhaustive"), "exhaustive", {"grid"});
        read(j.at("exhaustive"), "grid", s.exhaustive_grid, "exhaustive");
    }
    if (j.contains("compare")) {
        const json& o = j.at("compare");
        reject_unknown(o, "compare", {"methods"});
        std::vector<std::string> names;
        read(o, "methods", names, "compare");
        if (o.contains("methods")) {
            c.compare.clear();
            for (const auto& n : names) {
                try {
                    c.compare.push_back(parse_method(n));
                } catch (const std::exception& e) {
                    throw ConfigError(std::string("config: ") + e.what());
                }
            }
        }
    }
    if (j.contains("drl")) {
        const json& o = j.at("drl");
        reject_unknown(o, "drl",
                       {"policy", "rollout_steps", "zeta", "nu", "tau_polyak", "batch", "target_period", "episodes",
                        "steps_per_episode", "buffer_capacity", "epsilon_start", "epsilon_end",
                        "epsilon_decay_fraction", "noise_sigma_start", "noise_sigma_end", "actor_critic_hidden",
                        "q_hidden", "train_ps_dbm", "frozen_channel"});
        AgentHyperparams& a = c.agent;
        read(o, "policy", s.policy_path, "drl");
        read(o, "rollout_steps", s.rollout_steps, "drl");
        read(o, "zeta", a.zeta, "drl");
        read(o, "nu", a.nu, "drl");
        read(o, "tau_polyak", a.tau_polyak, "drl");
        read(o, "batch", a.batch, "drl");
        read(o, "target_period", a.target_period, "drl");
        read(o, "episodes", a.episodes, "drl");
        read(o, "steps_per_episode", a.steps_per_episode, "drl");
        read(o, "buffer_capacity", a.buffer_capacity, "drl");
        read(o, "epsilon_start", a.epsilon_start, "drl");
        read(o, "epsilon_end", a.epsilon_end, "drl");
        read(o, "epsilon_decay_fraction", a.epsilon_decay_fraction, "drl");
        read(o, "noise_sigma_start", a.noise_sigma_start, "drl");
        read(o, "noise_sigma_end", a.noise_sigma_end, "drl");
        read(o, "actor_critic_hidden", a.actor_critic_hidden, "drl");
        read(o, "q_hidden", a.q_hidden, "drl");
        read(o, "train_ps_dbm", c.train_ps_dbm, "drl");
        read(o, "frozen_channel", c.train_frozen_channel, "drl");
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        reject_unknown(o, "output", {"dir", "timing"});
        read(o, "dir", c.out_dir, "output");
        read(o, "timing", c.timing, "output");
    }
    return c;
}

RunConfig load_run_config(const std::string& path, const RunConfig& defaults) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_run_config(ss.str(), defaults);
}

}  // namespace fdswipt
