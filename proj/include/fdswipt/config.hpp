// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#pragma once

#include <string>
#include <vector>

#include "fdswipt/drl.hpp"
#include "fdswipt/harness.hpp"

namespace fdswipt {

/// Malformed or out-of-range configuration (CLI exit code 2).
class ConfigError : public ContractError {
public:
    using ContractError::ContractError;
};

/// Everything the command-line tool can be configured with.
///
/// Stored as one JSON document; missing keys keep their defaults and unknown
/// keys are rejected.
struct RunConfig {
    ExperimentScenario scenario;
    std::vector<Method> compare{Method::AntennaSplitSca, Method::TimeSwitching};
    AgentHyperparams agent;
    double train_ps_dbm = 30.0;
    bool train_frozen_channel = false;  ///< one channel (seed `channel_seed`) for all episodes
    std::uint64_t channel_seed = 0;     ///< channel used by allocate / precode / frozen training
    double single_ps_dbm = 30.0;        ///< power for allocate / precode
    std::string out_dir = ".";
    bool timing = false;

    void validate() const;
};

/// Parses a JSON document over `defaults`. Throws ConfigError.
RunConfig parse_run_config(const std::string& json_text, const RunConfig& defaults = {});
RunConfig load_run_config(const std::string& path, const RunConfig& defaults = {});

/// Fully-resolved JSON, two-space indentation.
std::string to_json_text(const RunConfig& config);

}  // namespace fdswipt
