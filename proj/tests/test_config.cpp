// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "fdswipt/config.hpp"

using namespace fdswipt;

TEST_CASE("empty document keeps the defaults") {
    const RunConfig c = parse_run_config("{}");
    CHECK(c.scenario.trials == 10000);
    CHECK(c.scenario.ps_dbm == std::vector<double>{20, 25, 30, 35, 40, 45, 50});
    CHECK(c.scenario.channel.m == 4);
    CHECK(c.scenario.channel.noise_psd_dbm_hz == -169.0);
    CHECK(c.scenario.alpha == 0.5);
    CHECK(c.scenario.ts_tau == 0.5);
    CHECK(c.agent.zeta == 0.99);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("values override defaults") {
    const RunConfig c = parse_run_config(R"({
      "method": "time_switching",
      "channel": {"m": 2, "n": 3, "si_attenuation_db": 20, "seed": 5},
      "budget": {"alpha": 0.3, "mixing": "raw"},
      "sweep": {"ps_dbm": [10, 20], "trials": 7, "seed": 99, "workers": 2},
      "sca": {"max_outer": 5},
      "compare": {"methods": ["antenna_split_equal_power", "time_switching"]},
      "drl": {"episodes": 12, "q_hidden": [8], "frozen_channel": true},
      "output": {"dir": "runs", "timing": true}
    })");
    CHECK(c.scenario.method == Method::TimeSwitching);
    CHECK(c.scenario.channel.n == 3);
    CHECK(c.scenario.channel.si_attenuation_db == 20);
    CHECK(c.channel_seed == 5);
    CHECK(c.scenario.mixing == EnergyMixing::Raw);
    CHECK(c.scenario.ps_dbm == std::vector<double>{10, 20});
    CHECK(c.scenario.seed == 99);
    CHECK(c.scenario.sca.max_outer == 5);
    CHECK(c.compare.front() == Method::AntennaSplitEqualPower);
    CHECK(c.agent.episodes == 12);
    CHECK(c.agent.q_hidden == std::vector<int>{8});
    CHECK(c.train_frozen_channel);
    CHECK(c.out_dir == "runs");
    CHECK(c.timing);
}

TEST_CASE("resolved config round trips through JSON") {
    RunConfig c;
    c.scenario.trials = 3;
    c.scenario.mixing = EnergyMixing::Raw;
    c.agent.actor_critic_hidden = {32};
    c.channel_seed = 12;
    const RunConfig back = parse_run_config(to_json_text(c));
    CHECK(to_json_text(back) == to_json_text(c));
    CHECK(back.scenario.trials == 3);
    CHECK(back.channel_seed == 12);
}

TEST_CASE("malformed documents raise ConfigError") {
    CHECK_THROWS_AS(parse_run_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"sweeps": {}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"channel": {"antennas": 4}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"sweep": {"trials": "many"}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"method": "magic"})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"budget": {"mixing": "linear"}})"), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/fdswipt.json"), ConfigError);
}

TEST_CASE("semantic validation raises ConfigError") {
    CHECK_THROWS_AS(parse_run_config(R"({"sweep": {"trials": 0}})").validate(), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"budget": {"alpha": 1.5}})").validate(), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"channel": {"m": 1}})").validate(), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"compare": {"methods": ["time_switching"]}})").validate(), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"drl": {"zeta": 1.0}})").validate(), ConfigError);
}
