// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fdswipt/allocation.hpp"
#include "fdswipt/channel.hpp"
#include "fdswipt/drl.hpp"
#include "fdswipt/metrics.hpp"
#include "fdswipt/precoding.hpp"

namespace fdswipt {

enum class Method {
    AntennaSplitSca,
    AntennaSplitEqualPower,
    TimeSwitching,
    DrlPolicy,
    Exhaustive,
};

std::string to_string(Method m);
Method parse_method(const std::string& text);

struct ExperimentScenario {
    Method method = Method::AntennaSplitSca;
    ChannelParams channel;
    std::vector<double> ps_dbm{20, 25, 30, 35, 40, 45, 50};
    int trials = 10000;
    std::uint64_t seed = 1;
    double alpha = 0.5;
    EnergyMixing mixing = EnergyMixing::Normalized;
    double ts_tau = 0.5;
    SeedPairRule seed_rule = SeedPairRule::MinGain;
    ScaSettings sca;
    int exhaustive_grid = 8;
    std::string policy_path;   ///< PolicyArtifact for drl_policy
    int rollout_steps = 10;    ///< drl_policy steps per trial, reward averaged
    int workers = 0;           ///< 0 = hardware concurrency

    /// Throws ContractError on an empty sweep, trials < 1 or an invalid component.
    void validate() const;
};

struct ResultRow {
    std::string method;
    double ps_dbm = 0.0;
    double mean_rate = 0.0;
    double std_rate = 0.0;
    double mean_harvested_w = 0.0;
    int trials = 0;
    double wall_ms = 0.0;
    int failures = 0;  ///< not part of the CSV; reported in the sidecar
};

/// Result of one trial; `failed` marks a solver or numerical failure.
struct TrialOutcome {
    double rate = 0.0;
    double harvested_w = 0.0;
    bool failed = false;
    std::string error;
};

/// splitmix64 of (master, trial); shared by every method and power point.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

/// Runs the scenario's method on the channel of trial `trial` at `ps_dbm`.
/// Numerical failures are captured in the outcome, contract errors propagate.
TrialOutcome run_trial(const ExperimentScenario& scenario, double ps_dbm, int trial,
                       const PolicyArtifact* policy = nullptr);

struct RunOptions {
    bool keep_trials = false;  ///< retain per-trial outcomes (needed for paired comparisons)
    bool timing = false;       ///< fill wall_ms; off by default so reruns are byte-identical
};

struct MonteCarloResult {
    std::vector<ResultRow> rows;
    std::vector<std::vector<TrialOutcome>> trials;  ///< [point][trial] when keep_trials
    bool degraded = false;                          ///< some row had more than 1% failed trials
};

/// Trials of one sweep point run on a worker pool; each result lands in its
/// trial slot and the aggregation is a fixed pairwise sum, so the output does
/// not depend on the worker count.
MonteCarloResult run_monte_carlo(const ExperimentScenario& scenario, const RunOptions& options = {});

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

void write_results_csv(std::ostream& os, std::span<const ResultRow> rows);

struct ComparisonRow {
    double ps_dbm = 0.0;
    std::string method_a;
    std::string method_b;
    double mean_gain = 0.0;  ///< mean over paired trials of rate_a - rate_b
    double paired_se = 0.0;  ///< sample std of the differences / sqrt(pairs)
    int pairs = 0;
};

struct Comparison {
    std::vector<ResultRow> rows;        ///< per-method rows, scenario order
    std::vector<ComparisonRow> gains;   ///< first scenario against each other one
    bool degraded = false;
};

/// Scenarios must share sweep, trials, seed and array size.
Comparison compare_methods(std::span<const ExperimentScenario> scenarios, const RunOptions& options = {});

void write_comparison_csv(std::ostream& os, std::span<const ComparisonRow> rows);

}  // namespace fdswipt
