// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fdswipt/channel.hpp"
#include "fdswipt/metrics.hpp"

namespace fdswipt {

/// One split of both arrays into energy-harvesting and information-transfer
/// antennas. Indices are 0-based internally and 1-based in text form.
struct SubsystemConfig {
    int delta = 0;             ///< position in enumerate_configs(M, N)
    std::vector<int> p1_eh;    ///< P1 antennas transmitting energy
    std::vector<int> p1_it;    ///< P1 antennas receiving information
    std::vector<int> p2_eh;    ///< P2 antennas harvesting
    std::vector<int> p2_it;    ///< P2 antennas transmitting information

    int m() const noexcept { return static_cast<int>(p1_eh.size() + p1_it.size()); }
    int n() const noexcept { return static_cast<int>(p2_eh.size() + p2_it.size()); }

    std::uint32_t p1_eh_mask() const;
    std::uint32_t p2_eh_mask() const;

    /// Throws ContractError unless all four sets are nonempty and each side
    /// is a disjoint cover of {0..m-1} / {0..n-1}.
    void validate(int m, int n) const;

    bool operator==(const SubsystemConfig&) const = default;
};

/// Number of configurations, (2^M - 2)(2^N - 2).
std::int64_t config_count(int m, int n);

/// Builds the config for the given EH masks; delta is filled in.
SubsystemConfig config_from_masks(int m, int n, std::uint32_t p1_eh_mask, std::uint32_t p2_eh_mask);

/// All configurations ordered by (p1_eh mask, p2_eh mask); delta equals position.
std::vector<SubsystemConfig> enumerate_configs(int m, int n);

/// "delta=5;p1_eh=1,3;p2_eh=2" (1-based antenna labels).
std::string to_string(const SubsystemConfig& config);
SubsystemConfig parse_config(const std::string& text, int m, int n);

enum class SeedPairRule {
    MinGain,  ///< line 3 as written: weakest |h|^2 pair starts the EH set
    MaxGain,  ///< sensitivity variant: strongest pair
};

/// Per-iteration record of the greedy allocation.
struct AllocationStep {
    int moved_p1 = -1;  ///< antenna moved at P1 (or -1)
    int moved_p2 = -1;  ///< antenna moved at P2 (or -1)
    double eh_power_estimate = 0.0;  ///< loop-condition value before the move
};

struct AllocationResult {
    SubsystemConfig config;
    int seed_p1 = -1;
    int seed_p2 = -1;
    std::vector<AllocationStep> steps;
};

/// Greedy antenna allocation with the full trace.
AllocationResult allocate_antennas_traced(const ChannelRealization& chan, double ps_watts,
                                          double pq_watts,
                                          SeedPairRule rule = SeedPairRule::MinGain);

SubsystemConfig allocate_antennas(const ChannelRealization& chan, double ps_watts, double pq_watts,
                                  SeedPairRule rule = SeedPairRule::MinGain);

struct ExhaustiveResult {
    SubsystemConfig config;
    CovariancePair covariances;
    double objective = 0.0;
    std::int64_t evaluated_points = 0;
};

inline constexpr int kExhaustiveMaxAntennas = 3;

/// Grid search over every configuration and diagonal Q1, Q2 on the power
/// simplex with `power_grid` levels per antenna. Refuses M or N above
/// kExhaustiveMaxAntennas.
ExhaustiveResult exhaustive_search(const ChannelRealization& chan, const PowerBudget& budget,
                                   int power_grid, double noise_power,
                                   const std::optional<SubsystemConfig>& only_config = std::nullopt);

}  // namespace fdswipt
