// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fdswipt/allocation.hpp"
#include "fdswipt/channel.hpp"
#include "fdswipt/metrics.hpp"
#include "fdswipt/mlp.hpp"

namespace fdswipt {

/// Raised when a network update produces non-finite values.
class TrainingFailure : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

struct EnvState {
    double s1 = 0.0;  ///< power available at P2 [W], the energy harvested in the previous slot
    double s2 = 0.0;  ///< effective SINR of the previous slot (linear)
};

struct EnvAction {
    std::vector<double> precoding;  ///< M² + N² entries in [0,1]; W1 from the front, W2 from offset M²
    int config = 0;                 ///< index into enumerate_configs(M, N)
};

struct Transition {
    EnvState state;
    EnvAction action;
    double reward = 0.0;
    EnvState next;
};

/// Fixed-capacity FIFO ring of transitions.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 20000);

    void push(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }

    /// i = 0 is the oldest stored transition.
    const Transition& at(std::size_t i) const;

    /// `count` distinct transitions drawn uniformly (Floyd's algorithm).
    std::vector<Transition> sample(std::size_t count, std::mt19937_64& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  ///< slot of the oldest item once the ring is full
    std::vector<Transition> items_;
};

struct AgentHyperparams {
    double zeta = 0.99;            ///< discount
    double nu = 5e-5;              ///< Adam learning rate, all networks
    double tau_polyak = 1e-3;
    int batch = 64;
    int target_period = 100;       ///< steps between target updates
    int episodes = 300;
    int steps_per_episode = 100;
    std::size_t buffer_capacity = 20000;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_decay_fraction = 1.0 / 3.0;  ///< share of all steps over which ε decays linearly
    double noise_sigma_start = 0.1;
    double noise_sigma_end = 0.01;
    std::vector<int> actor_critic_hidden{256, 128};
    std::vector<int> q_hidden{64, 64};

    void validate() const;

    /// 2500 episodes × 500 steps.
    static AgentHyperparams full_scale();
};

struct StepOutcome {
    EnvState next;
    double reward = 0.0;
    double harvested_watts = 0.0;  ///< before the P_S clamp
};

/// One frozen channel with its configuration list.
///
/// The precoding slice for W1 is the first M_h² entries (row-major), for W2
/// the first N_I² entries after offset M². Each W is scaled by the square
/// root of its budget and pulled back onto the trace ball, so
/// Tr(W W†) = budget · min(‖slice‖², 1). W1's budget is P_S, W2's is s1.
class Environment {
public:
    Environment(ChannelRealization chan, const PowerBudget& budget, double noise_power);

    int m() const { return chan_.m(); }
    int n() const { return chan_.n(); }
    int action_size() const { return m() * m() + n() * n(); }
    int config_count() const { return static_cast<int>(configs_.size()); }
    const std::vector<SubsystemConfig>& configs() const { return configs_; }
    const ChannelRealization& channel() const { return chan_; }
    double noise_power() const { return noise_; }
    double source_power() const { return ps_; }

    /// s1 = P_S (full initial charge); s2 from the greedy allocation with equal power.
    EnvState initial_state() const;

    CovariancePair covariances(const EnvState& state, const EnvAction& action) const;
    StepOutcome step(const EnvState& state, const EnvAction& action) const;

private:
    ChannelRealization chan_;
    double ps_;
    double noise_;
    std::vector<SubsystemConfig> configs_;
};

StepOutcome env_step(const EnvState& state, const EnvAction& action, const ChannelRealization& chan,
                     const PowerBudget& budget, double noise_power);

/// Standardizes (log10 s1, log2(1 + s2)) with running mean and variance.
class FeatureScaler {
public:
    static constexpr int kFeatures = 2;

    static Eigen::Vector2d raw_features(const EnvState& s);

    void observe(const EnvState& s);
    Eigen::Vector2d transform(const EnvState& s) const;
    RMatrix transform(std::span<const EnvState> states) const;

    long count() const { return count_; }
    const Eigen::Vector2d& mean() const { return mean_; }
    Eigen::Vector2d variance() const;

    static FeatureScaler from_moments(long count, const Eigen::Vector2d& mean, const Eigen::Vector2d& m2);
    const Eigen::Vector2d& m2() const { return m2_; }

private:
    long count_ = 0;
    Eigen::Vector2d mean_ = Eigen::Vector2d::Zero();
    Eigen::Vector2d m2_ = Eigen::Vector2d::Zero();
};

/// Online networks, targets and optimizers of the hybrid agent.
struct AgentNetworks {
    Mlp actor;          ///< features → precoding action, sigmoid output
    Mlp critic;         ///< [features; precoding] → Q, linear output
    Mlp qnet;           ///< features → Q per configuration
    Mlp actor_target;
    Mlp critic_target;
    Mlp qnet_target;
    Adam actor_opt;
    Adam critic_opt;
    Adam qnet_opt;
    long ddpg_updates = 0;
    long ddqn_updates = 0;

    /// Initialization draws actor, critic, qnet in that order; targets are copies.
    static AgentNetworks create(int action_size, int config_count, const AgentHyperparams& hp,
                                std::mt19937_64& rng);
};

struct DdpgLosses {
    double critic_loss = 0.0;
    double actor_objective = 0.0;  ///< mean Q(s, μ(s)) before the actor step
};

/// y = r + ζ·Q'(s', μ'(s')).
Eigen::VectorXd ddpg_targets(std::span<const Transition> batch, const FeatureScaler& scaler,
                             const AgentNetworks& nets, double zeta);

/// Gradient of -mean Q(s, μ(s)) with respect to the actor parameters, taken
/// through the current critic. `objective` receives mean Q(s, μ(s)).
Mlp::Gradients actor_gradient(std::span<const Transition> batch, const FeatureScaler& scaler,
                              const AgentNetworks& nets, double* objective = nullptr);

/// One critic step, one actor step; Polyak update of both targets every `target_period` calls.
DdpgLosses ddpg_update(std::span<const Transition> batch, const FeatureScaler& scaler, AgentNetworks& nets,
                       const AgentHyperparams& hp);

/// a* = argmax_a Q'_target(s', a), y = r + ζ·Q_online(s', a*).
Eigen::VectorXd ddqn_targets(std::span<const Transition> batch, const FeatureScaler& scaler, const Mlp& qnet,
                             const Mlp& qnet_target, double zeta);

/// One step on the squared TD error of the taken configuration; returns the loss before the step.
double ddqn_update(std::span<const Transition> batch, const FeatureScaler& scaler, AgentNetworks& nets,
                   const AgentHyperparams& hp);

/// θ' ← τθ + (1-τ)θ'.
void polyak_update(Mlp& target, const Mlp& online, double tau);

/// Everything needed to act, plus the targets for resuming.
struct PolicyArtifact {
    int m = 0;
    int n = 0;
    std::uint64_t seed = 0;
    double ps_watts = 0.0;
    double noise_power = 0.0;
    AgentHyperparams hp;
    FeatureScaler scaler;
    Mlp actor;
    Mlp critic;
    Mlp qnet;
    Mlp actor_target;
    Mlp critic_target;
    Mlp qnet_target;

    /// Deterministic action: actor output and argmax configuration.
    EnvAction act(const EnvState& state) const;

    void write(std::ostream& os) const;
    static PolicyArtifact read(std::istream& is);
    void save(const std::string& path) const;
    static PolicyArtifact load(const std::string& path);
};

struct TrainingCurveRow {
    int episode = 0;
    double mean_reward = 0.0;
    double mean_harvested_w = 0.0;
    double epsilon = 0.0;
};

void write_training_curve(std::ostream& os, std::span<const TrainingCurveRow> rows);

struct TrainOptions {
    std::optional<ChannelRealization> frozen_channel;  ///< reuse one channel for every episode
    std::string checkpoint_path;                       ///< artifact written here if training aborts
};

struct TrainResult {
    PolicyArtifact policy;
    std::vector<TrainingCurveRow> curve;
};

/// Joint DDPG (precoding) and DDQN (configuration) training.
///
/// One mt19937_64 stream seeded with `seed`. Draw order: network
/// initialization; then per episode a channel seed (skipped for a frozen
/// channel); per step the exploration noise for every precoding entry, the
/// ε-greedy uniform, the random configuration when exploring, and the
/// minibatch indices shared by both updates.
TrainResult train(const ChannelParams& chan_params, const PowerBudget& budget, const AgentHyperparams& hp,
                  std::uint64_t seed, const TrainOptions& options = {});

struct PolicyRollout {
    double mean_reward = 0.0;
    double mean_harvested_w = 0.0;
    int steps = 0;
};

/// Greedy rollout from the initial state; pure.
PolicyRollout evaluate_policy(const PolicyArtifact& policy, const ChannelRealization& chan,
                              const PowerBudget& budget, int steps);

}  // namespace fdswipt
