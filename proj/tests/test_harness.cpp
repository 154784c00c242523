// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <set>
#include <sstream>

#include "fdswipt/harness.hpp"

using namespace fdswipt;

namespace {

ExperimentScenario small(Method m) {
    ExperimentScenario s;
    s.method = m;
    s.channel.m = 3;
    s.channel.n = 3;
    s.ps_dbm = {20, 35};
    s.trials = 40;
    s.seed = 17;
    s.workers = 1;
    return s;
}

std::string csv_of(const MonteCarloResult& r) {
    std::ostringstream os;
    write_results_csv(os, r.rows);
    return os.str();
}

}  // namespace

TEST_CASE("method names round trip") {
    for (Method m : {Method::AntennaSplitSca, Method::AntennaSplitEqualPower, Method::TimeSwitching,
                     Method::DrlPolicy, Method::Exhaustive})
        CHECK(parse_method(to_string(m)) == m);
    CHECK_THROWS_AS(parse_method("water_filling"), ContractError);
}

TEST_CASE("trial seeds are distinct and independent of the method") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t t = 0; t < 1000; ++t) seen.insert(trial_seed(1, t));
    CHECK(seen.size() == 1000);
    CHECK(trial_seed(1, 0) != trial_seed(2, 0));
}

TEST_CASE("single trial equals a direct pipeline call") {
    ExperimentScenario s = small(Method::AntennaSplitEqualPower);
    s.ps_dbm = {30};
    s.trials = 1;
    const auto r = run_monte_carlo(s);
    REQUIRE(r.rows.size() == 1);

    const auto chan = sample_channel(s.channel, trial_seed(s.seed, 0));
    const auto b = PowerBudget::at_source_power(dbm_to_watts(30));
    const auto sub = partition(chan, allocate_antennas(chan, b.ps, b.pq), s.channel.noise_power());
    const auto qp = equal_power(sub, b);
    CHECK(r.rows[0].mean_rate == info_rate(sub, qp));
    CHECK(r.rows[0].mean_harvested_w == harvested_power(sub, qp));
    CHECK(r.rows[0].std_rate == 0.0);
    CHECK(r.rows[0].trials == 1);
    CHECK(r.rows[0].wall_ms == 0.0);

    ExperimentScenario ts = s;
    ts.method = Method::TimeSwitching;
    CHECK(run_monte_carlo(ts).rows[0].mean_rate == time_switching_rate(chan, b, 0.5, s.channel.noise_power()));
}

TEST_CASE("rows are reproducible and independent of the worker count") {
    ExperimentScenario s = small(Method::AntennaSplitSca);
    const std::string one = csv_of(run_monte_carlo(s));
    CHECK(csv_of(run_monte_carlo(s)) == one);
    s.workers = 4;
    CHECK(csv_of(run_monte_carlo(s)) == one);
    s.seed = 18;
    CHECK(csv_of(run_monte_carlo(s)) != one);
}

TEST_CASE("CSV schema") {
    const auto r = run_monte_carlo(small(Method::TimeSwitching));
    const std::string text = csv_of(r);
    CHECK(text.rfind("method,ps_dbm,mean_rate,std_rate,mean_harvested_w,trials,wall_ms\n", 0) == 0);
    std::istringstream is(text);
    std::string line;
    int rows = -1;
    while (std::getline(is, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 6);
    }
    CHECK(rows == 2);
}

TEST_CASE("reported mean equals the per-trial mean") {
    const auto s = small(Method::AntennaSplitSca);
    RunOptions keep;
    keep.keep_trials = true;
    const auto r = run_monte_carlo(s, keep);
    REQUIRE(r.trials.size() == 2);
    for (std::size_t p = 0; p < 2; ++p) {
        double sum = 0.0;
        double sq = 0.0;
        for (const auto& t : r.trials[p]) sum += t.rate;
        const double mean = sum / s.trials;
        for (const auto& t : r.trials[p]) sq += (t.rate - mean) * (t.rate - mean);
        CHECK(std::abs(mean - r.rows[p].mean_rate) < 1e-12);
        CHECK(r.rows[p].std_rate == doctest::Approx(std::sqrt(sq / (s.trials - 1))).epsilon(1e-10));
        CHECK(r.rows[p].mean_rate >= 0.0);
        CHECK(r.rows[p].failures == 0);
    }
    CHECK_FALSE(r.degraded);
}

TEST_CASE("pairwise_sum") {
    std::vector<double> v(1000);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = 1.0 / double(k + 1);
    double naive = 0.0;
    for (double x : v) naive += x;
    CHECK(pairwise_sum(v) == doctest::Approx(naive).epsilon(1e-14));
    CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
}

TEST_CASE("comparisons") {
    SUBCASE("self comparison gains are zero") {
        const std::vector<ExperimentScenario> pair{small(Method::TimeSwitching), small(Method::TimeSwitching)};
        const auto c = compare_methods(pair);
        REQUIRE(c.gains.size() == 2);
        for (const auto& g : c.gains) {
            CHECK(g.mean_gain == 0.0);
            CHECK(g.paired_se == 0.0);
            CHECK(g.pairs == 40);
        }
    }
    SUBCASE("gain equals the mean of paired differences") {
        const std::vector<ExperimentScenario> pair{small(Method::AntennaSplitSca), small(Method::AntennaSplitEqualPower)};
        const auto c = compare_methods(pair);
        RunOptions keep;
        keep.keep_trials = true;
        const auto a = run_monte_carlo(pair[0], keep);
        const auto b = run_monte_carlo(pair[1], keep);
        for (std::size_t p = 0; p < 2; ++p) {
            double d = 0.0;
            for (int t = 0; t < 40; ++t) d += a.trials[p][t].rate - b.trials[p][t].rate;
            CHECK(c.gains[p].mean_gain == doctest::Approx(d / 40).epsilon(1e-12));
            CHECK(c.gains[p].method_a == "antenna_split_sca");
            CHECK(c.gains[p].method_b == "antenna_split_equal_power");
        }
        std::ostringstream os;
        write_comparison_csv(os, c.gains);
        CHECK(os.str().rfind("ps_dbm,method_a,method_b,mean_gain,paired_se,pairs\n", 0) == 0);
    }
    SUBCASE("mismatched scenarios are rejected") {
        std::vector<ExperimentScenario> pair{small(Method::TimeSwitching), small(Method::AntennaSplitSca)};
        pair[1].ps_dbm = {20, 40};
        CHECK_THROWS_AS(compare_methods(pair), ContractError);
        pair[1] = small(Method::AntennaSplitSca);
        pair[1].trials = 39;
        CHECK_THROWS_AS(compare_methods(pair), ContractError);
        pair[1] = small(Method::AntennaSplitSca);
        pair[1].channel.m = 4;
        CHECK_THROWS_AS(compare_methods(pair), ContractError);
        CHECK_THROWS_AS(compare_methods(std::span<const ExperimentScenario>(pair.data(), 1)), ContractError);
    }
}

TEST_CASE("scenario validation") {
    ExperimentScenario s = small(Method::AntennaSplitSca);
    s.ps_dbm.clear();
    CHECK_THROWS_AS(run_monte_carlo(s), ContractError);
    s = small(Method::AntennaSplitSca);
    s.trials = 0;
    CHECK_THROWS_AS(run_monte_carlo(s), ContractError);
    s = small(Method::Exhaustive);
    s.channel.m = 4;
    CHECK_THROWS_AS(run_monte_carlo(s), ContractError);
    s = small(Method::DrlPolicy);
    CHECK_THROWS_AS(run_monte_carlo(s), ContractError);
}

TEST_CASE("exhaustive method runs on small arrays") {
    ExperimentScenario s = small(Method::Exhaustive);
    s.channel.m = 2;
    s.channel.n = 2;
    s.trials = 3;
    s.exhaustive_grid = 4;
    const auto r = run_monte_carlo(s);
    CHECK(r.rows.size() == 2);
    CHECK(r.rows[0].mean_rate >= 0.0);
}
