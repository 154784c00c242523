// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#include "fdswipt/drl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace fdswipt {

// ---------------------------------------------------------------- replay

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ContractError("ReplayBuffer: capacity must be >= 1");
    items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
        return;
    }
    items_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= items_.size()) throw ContractError("ReplayBuffer::at: index out of range");
    return items_[(head_ + i) % items_.size()];
}

std::vector<Transition> ReplayBuffer::sample(std::size_t count, std::mt19937_64& rng) const {
    if (count == 0 || count > items_.size()) {
        std::ostringstream os;
        os << "ReplayBuffer::sample: cannot draw " << count << " distinct items from " << items_.size();
        throw ContractError(os.str());
    }
    const std::size_t n = items_.size();
    std::vector<std::size_t> picked;
    picked.reserve(count);
    for (std::size_t j = n - count; j < n; ++j) {
        std::uniform_int_distribution<std::size_t> pick(0, j);
        const std::size_t t = pick(rng);
        if (std::find(picked.begin(), picked.end(), t) == picked.end())
            picked.push_back(t);
        else
            picked.push_back(j);
    }
    std::vector<Transition> out;
    out.reserve(count);
    for (std::size_t i : picked) out.push_back(items_[i]);
    return out;
}

// ------------------------------------------------------------ hyperparams

void AgentHyperparams::validate() const {
    if (!(zeta >= 0.0 && zeta < 1.0)) throw ContractError("AgentHyperparams: zeta must lie in [0,1)");
    if (!(tau_polyak > 0.0 && tau_polyak <= 1.0)) throw ContractError("AgentHyperparams: tau must lie in (0,1]");
    if (!(nu > 0.0)) throw ContractError("AgentHyperparams: learning rate must be positive");
    if (batch < 1 || target_period < 1 || episodes < 1 || steps_per_episode < 1 || buffer_capacity < 1)
        throw ContractError("AgentHyperparams: counts must be >= 1");
    if (static_cast<std::size_t>(batch) > buffer_capacity)
        throw ContractError("AgentHyperparams: batch larger than the replay buffer");
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0))
        throw ContractError("AgentHyperparams: epsilon schedule outside [0,1]");
    if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0))
        throw ContractError("AgentHyperparams: epsilon decay fraction must lie in (0,1]");
    if (!(noise_sigma_start >= 0.0 && noise_sigma_end >= 0.0))
        throw ContractError("AgentHyperparams: exploration noise must be >= 0");
    for (int w : actor_critic_hidden)
        if (w < 1) throw ContractError("AgentHyperparams: hidden widths must be >= 1");
    for (int w : q_hidden)
        if (w < 1) throw ContractError("AgentHyperparams: hidden widths must be >= 1");
}

AgentHyperparams AgentHyperparams::full_scale() {
    AgentHyperparams hp;
    hp.episodes = 2500;
    hp.steps_per_episode = 500;
    return hp;
}

// ----------------------------------------------------------- environment

Environment::Environment(ChannelRealization chan, const PowerBudget& budget, double noise_power)
    : chan_(std::move(chan)), ps_(budget.ps), noise_(noise_power), configs_(enumerate_configs(chan_.m(), chan_.n())) {
    budget.validate();
    if (!(noise_power > 0.0)) throw ContractError("Environment: noise power must be positive");
}

EnvState Environment::initial_state() const {
    const SubsystemConfig cfg = allocate_antennas(chan_, ps_, ps_);
    const SubsystemChannels sub = partition(chan_, cfg, noise_);
    const CovariancePair qp{PsdMatrix::scaled_identity(sub.m_eh(), ps_ / sub.m_eh()),
                            PsdMatrix::scaled_identity(sub.n_it(), ps_ / sub.n_it())};
    return {ps_, effective_sinr(info_rate(sub, qp))};
}

namespace {

CMatrix scaled_block(std::span<const double> slice, int dim, double budget) {
    CMatrix w(dim, dim);
    double norm2 = 0.0;
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
            const double v = slice[static_cast<std::size_t>(r * dim + c)];
            w(r, c) = Complex(v, 0.0);
            norm2 += v * v;
        }
    const double shrink = norm2 > 1.0 ? 1.0 / std::sqrt(norm2) : 1.0;
    return w * Complex(std::sqrt(std::max(budget, 0.0)) * shrink, 0.0);
}

void check_action(const EnvAction& a, int action_size, int configs) {
    if (a.config < 0 || a.config >= configs) {
        std::ostringstream os;
        os << "env_step: configuration index " << a.config << " outside [0," << configs << ")";
        throw ContractError(os.str());
    }
    if (static_cast<int>(a.precoding.size()) != action_size) {
        std::ostringstream os;
        os << "env_step: precoding action has " << a.precoding.size() << " entries, expected " << action_size;
        throw ContractError(os.str());
    }
    for (double v : a.precoding)
        if (!(v >= 0.0 && v <= 1.0)) throw ContractError("env_step: precoding entries must lie in [0,1]");
}

}  // namespace

CovariancePair Environment::covariances(const EnvState& state, const EnvAction& action) const {
    check_action(action, action_size(), config_count());
    if (!(state.s1 >= 0.0) || !(state.s2 >= 0.0)) throw ContractError("env_step: state entries must be >= 0");
    const SubsystemConfig& cfg = configs_[static_cast<std::size_t>(action.config)];
    const int mh = static_cast<int>(cfg.p1_eh.size());
    const int ni = static_cast<int>(cfg.p2_it.size());
    const std::span<const double> all(action.precoding);
    const CMatrix w1 = scaled_block(all.subspan(0, static_cast<std::size_t>(mh * mh)), mh, ps_);
    const CMatrix w2 = scaled_block(all.subspan(static_cast<std::size_t>(m() * m()), static_cast<std::size_t>(ni * ni)),
                                    ni, std::min(state.s1, ps_));
    return {PsdMatrix::from(w1 * w1.adjoint()), PsdMatrix::from(w2 * w2.adjoint())};
}

StepOutcome Environment::step(const EnvState& state, const EnvAction& action) const {
    const CovariancePair qp = covariances(state, action);
    const SubsystemChannels sub = partition(chan_, configs_[static_cast<std::size_t>(action.config)], noise_);
    StepOutcome out;
    out.reward = info_rate(sub, qp);
    out.harvested_watts = harvested_power(sub, qp);
    out.next.s1 = std::min(out.harvested_watts, ps_);
    out.next.s2 = effective_sinr(out.reward);
    return out;
}

StepOutcome env_step(const EnvState& state, const EnvAction& action, const ChannelRealization& chan,
                     const PowerBudget& budget, double noise_power) {
    return Environment(chan, budget, noise_power).step(state, action);
}

// -------------------------------------------------------------- features

Eigen::Vector2d FeatureScaler::raw_features(const EnvState& s) {
    return {std::log10(std::max(s.s1, 1e-300)), std::log2(1.0 + std::max(s.s2, 0.0))};
}

void FeatureScaler::observe(const EnvState& s) {
    const Eigen::Vector2d x = raw_features(s);
    ++count_;
    const Eigen::Vector2d d = x - mean_;
    mean_ += d / double(count_);
    m2_ += d.cwiseProduct(x - mean_);
}

Eigen::Vector2d FeatureScaler::variance() const {
    if (count_ < 2) return Eigen::Vector2d::Ones();
    return m2_ / double(count_ - 1);
}

Eigen::Vector2d FeatureScaler::transform(const EnvState& s) const {
    const Eigen::Vector2d sd = variance().cwiseSqrt().cwiseMax(1e-3);
    return (raw_features(s) - mean_).cwiseQuotient(sd);
}

RMatrix FeatureScaler::transform(std::span<const EnvState> states) const {
    RMatrix out(kFeatures, static_cast<Eigen::Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = transform(states[i]);
    return out;
}

FeatureScaler FeatureScaler::from_moments(long count, const Eigen::Vector2d& mean, const Eigen::Vector2d& m2) {
    FeatureScaler f;
    f.count_ = count;
    f.mean_ = mean;
    f.m2_ = m2;
    return f;
}

// -------------------------------------------------------------- networks

namespace {

std::vector<int> layout(int in, const std::vector<int>& hidden, int out) {
    std::vector<int> w{in};
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(out);
    return w;
}

std::vector<Activation> relu_then(std::size_t hidden, Activation last) {
    std::vector<Activation> a(hidden, Activation::Relu);
    a.push_back(last);
    return a;
}

}  // namespace

AgentNetworks AgentNetworks::create(int action_size, int config_count, const AgentHyperparams& hp,
                                    std::mt19937_64& rng) {
    hp.validate();
    const int f = FeatureScaler::kFeatures;
    const std::size_t h = hp.actor_critic_hidden.size();
    AgentNetworks nets;
    nets.actor = Mlp(layout(f, hp.actor_critic_hidden, action_size), relu_then(h, Activation::Sigmoid), rng, 3e-3);
    nets.critic = Mlp(layout(f + action_size, hp.actor_critic_hidden, 1), relu_then(h, Activation::Linear), rng, 3e-3);
    nets.qnet = Mlp(layout(f, hp.q_hidden, config_count), relu_then(hp.q_hidden.size(), Activation::Linear), rng);
    nets.actor_target = nets.actor;
    nets.critic_target = nets.critic;
    nets.qnet_target = nets.qnet;
    nets.actor_opt = Adam(nets.actor, hp.nu);
    nets.critic_opt = Adam(nets.critic, hp.nu);
    nets.qnet_opt = Adam(nets.qnet, hp.nu);
    return nets;
}

namespace {

struct BatchView {
    RMatrix features;
    RMatrix next_features;
    RMatrix actions;
    std::vector<int> configs;
    Eigen::VectorXd rewards;
};

BatchView view(std::span<const Transition> batch, const FeatureScaler& scaler) {
    if (batch.empty()) throw ContractError("update: empty batch");
    const auto b = static_cast<Eigen::Index>(batch.size());
    const auto a = static_cast<Eigen::Index>(batch.front().action.precoding.size());
    BatchView v;
    v.features.resize(FeatureScaler::kFeatures, b);
    v.next_features.resize(FeatureScaler::kFeatures, b);
    v.actions.resize(a, b);
    v.rewards.resize(b);
    for (Eigen::Index i = 0; i < b; ++i) {
        const Transition& t = batch[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(t.action.precoding.size()) != a)
            throw ContractError("update: inconsistent action sizes in batch");
        v.features.col(i) = scaler.transform(t.state);
        v.next_features.col(i) = scaler.transform(t.next);
        for (Eigen::Index k = 0; k < a; ++k) v.actions(k, i) = t.action.precoding[static_cast<std::size_t>(k)];
        v.configs.push_back(t.action.config);
        v.rewards(i) = t.reward;
    }
    return v;
}

RMatrix stack(const RMatrix& top, const RMatrix& bottom) {
    RMatrix out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

void require_finite(const Mlp::Gradients& g, const char* what, double loss) {
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
        if (!g.weights[l].allFinite() || !g.biases[l].allFinite()) {
            std::ostringstream os;
            os << what << ": non-finite gradient in layer " << l << " (loss " << loss << ")";
            throw TrainingFailure(os.str());
        }
    }
}

Eigen::Index argmax_column(const RMatrix& q, Eigen::Index col) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < q.rows(); ++r)
        if (q(r, col) > q(best, col)) best = r;
    return best;
}

}  // namespace

Eigen::VectorXd ddpg_targets(std::span<const Transition> batch, const FeatureScaler& scaler,
                             const AgentNetworks& nets, double zeta) {
    const BatchView v = view(batch, scaler);
    const RMatrix next_actions = nets.actor_target.forward(v.next_features);
    const RMatrix next_q = nets.critic_target.forward(stack(v.next_features, next_actions));
    return v.rewards + zeta * next_q.row(0).transpose();
}

Mlp::Gradients actor_gradient(std::span<const Transition> batch, const FeatureScaler& scaler,
                              const AgentNetworks& nets, double* objective) {
    const BatchView v = view(batch, scaler);
    const double b = static_cast<double>(batch.size());
    // Actor ascends mean Q(s, μ(s)); the optimizer minimizes, so push -1/B through the critic.
    Mlp::Tape actor_tape;
    const RMatrix mu = nets.actor.forward(v.features, actor_tape);
    Mlp::Tape q_tape;
    const RMatrix q_mu = nets.critic.forward(stack(v.features, mu), q_tape);
    if (objective) *objective = q_mu.row(0).mean();
    const RMatrix grad_in = nets.critic.backward(q_tape, RMatrix::Constant(1, q_mu.cols(), -1.0 / b), nullptr);
    Mlp::Gradients grads;
    nets.actor.backward(actor_tape, grad_in.bottomRows(mu.rows()), &grads);
    return grads;
}

DdpgLosses ddpg_update(std::span<const Transition> batch, const FeatureScaler& scaler, AgentNetworks& nets,
                       const AgentHyperparams& hp) {
    const BatchView v = view(batch, scaler);
    const double b = static_cast<double>(batch.size());
    if (v.actions.rows() != nets.actor.output_size()) throw ContractError("ddpg_update: action size mismatch");
    const Eigen::VectorXd y = ddpg_targets(batch, scaler, nets, hp.zeta);

    DdpgLosses out;
    Mlp::Tape critic_tape;
    const RMatrix q = nets.critic.forward(stack(v.features, v.actions), critic_tape);
    const Eigen::RowVectorXd err = q.row(0) - y.transpose();
    out.critic_loss = err.squaredNorm() / b;
    Mlp::Gradients critic_grads;
    nets.critic.backward(critic_tape, (2.0 / b) * err, &critic_grads);
    require_finite(critic_grads, "ddpg_update (critic)", out.critic_loss);
    nets.critic_opt.step(nets.critic, critic_grads);

    const Mlp::Gradients actor_grads = actor_gradient(batch, scaler, nets, &out.actor_objective);
    require_finite(actor_grads, "ddpg_update (actor)", -out.actor_objective);
    nets.actor_opt.step(nets.actor, actor_grads);

    if (++nets.ddpg_updates % hp.target_period == 0) {
        polyak_update(nets.actor_target, nets.actor, hp.tau_polyak);
        polyak_update(nets.critic_target, nets.critic, hp.tau_polyak);
    }
    return out;
}

Eigen::VectorXd ddqn_targets(std::span<const Transition> batch, const FeatureScaler& scaler, const Mlp& qnet,
                             const Mlp& qnet_target, double zeta) {
    const BatchView v = view(batch, scaler);
    const RMatrix select = qnet_target.forward(v.next_features);
    const RMatrix evaluate = qnet.forward(v.next_features);
    Eigen::VectorXd y(v.rewards.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = v.rewards(i) + zeta * evaluate(argmax_column(select, i), i);
    return y;
}

double ddqn_update(std::span<const Transition> batch, const FeatureScaler& scaler, AgentNetworks& nets,
                   const AgentHyperparams& hp) {
    const BatchView v = view(batch, scaler);
    const double b = static_cast<double>(batch.size());
    const Eigen::VectorXd y = ddqn_targets(batch, scaler, nets.qnet, nets.qnet_target, hp.zeta);

    Mlp::Tape tape;
    const RMatrix q = nets.qnet.forward(v.features, tape);
    RMatrix grad = RMatrix::Zero(q.rows(), q.cols());
    double loss = 0.0;
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
        const int a = v.configs[static_cast<std::size_t>(i)];
        if (a < 0 || a >= q.rows()) throw ContractError("ddqn_update: configuration index out of range");
        const double e = q(a, i) - y(i);
        loss += e * e;
        grad(a, i) = 2.0 * e / b;
    }
    loss /= b;
    Mlp::Gradients grads;
    nets.qnet.backward(tape, grad, &grads);
    require_finite(grads, "ddqn_update", loss);
    nets.qnet_opt.step(nets.qnet, grads);

    if (++nets.ddqn_updates % hp.target_period == 0) polyak_update(nets.qnet_target, nets.qnet, hp.tau_polyak);
    return loss;
}

void polyak_update(Mlp& target, const Mlp& online, double tau) { target.blend_from(online, tau); }

// -------------------------------------------------------------- artifact

EnvAction PolicyArtifact::act(const EnvState& state) const {
    const RMatrix x = scaler.transform(state);
    const RMatrix a = actor.forward(x);
    const RMatrix q = qnet.forward(x);
    EnvAction out;
    out.precoding.assign(a.data(), a.data() + a.size());
    out.config = static_cast<int>(argmax_column(q, 0));
    return out;
}

namespace {

constexpr const char* kPolicyMagic = "fdswipt-policy";
constexpr int kPolicyVersion = 1;

void write_net(std::ostream& os, const std::string& name, const Mlp& net) {
    os << "net " << name << "\nwidths";
    for (int w : net.widths()) os << ' ' << w;
    os << "\nactivations";
    for (Activation a : net.activations()) os << ' ' << to_string(a);
    const std::vector<double> p = net.parameters();
    os << "\nparams " << p.size() << '\n';
    for (std::size_t i = 0; i < p.size(); ++i) os << p[i] << ((i % 8 == 7 || i + 1 == p.size()) ? '\n' : ' ');
}

template <typename T>
T read_value(std::istream& is, const char* what) {
    T v{};
    if (!(is >> v)) throw ContractError(std::string("policy artifact: cannot read ") + what);
    return v;
}

void expect(std::istream& is, const std::string& keyword) {
    const auto word = read_value<std::string>(is, keyword.c_str());
    if (word != keyword) throw ContractError("policy artifact: expected '" + keyword + "', found '" + word + "'");
}

Mlp read_net(std::istream& is, const std::string& name) {
    expect(is, "net");
    expect(is, name);
    expect(is, "widths");
    std::string line;
    std::getline(is, line);
    std::istringstream ws(line);
    std::vector<int> widths;
    for (int w; ws >> w;) widths.push_back(w);
    expect(is, "activations");
    std::getline(is, line);
    std::istringstream as(line);
    std::vector<Activation> acts;
    for (std::string a; as >> a;) acts.push_back(parse_activation(a));
    expect(is, "params");
    const auto count = read_value<std::size_t>(is, "parameter count");
    std::vector<double> flat(count);
    for (double& v : flat) v = read_value<double>(is, "parameter");
    return Mlp::from_parts(std::move(widths), std::move(acts), flat);
}

}  // namespace

void PolicyArtifact::write(std::ostream& os) const {
    const auto flags = os.flags();
    const auto precision = os.precision();
    os << std::setprecision(17);
    os << kPolicyMagic << ' ' << kPolicyVersion << '\n';
    os << "dims " << m << ' ' << n << '\n';
    os << "seed " << seed << '\n';
    os << "ps_watts " << ps_watts << '\n';
    os << "noise_power " << noise_power << '\n';
    os << "hyper " << hp.zeta << ' ' << hp.nu << ' ' << hp.tau_polyak << ' ' << hp.batch << ' ' << hp.target_period
       << ' ' << hp.episodes << ' ' << hp.steps_per_episode << ' ' << hp.buffer_capacity << ' ' << hp.epsilon_start
       << ' ' << hp.epsilon_end << ' ' << hp.epsilon_decay_fraction << ' ' << hp.noise_sigma_start << ' '
       << hp.noise_sigma_end << '\n';
    os << "scaler " << scaler.count() << ' ' << scaler.mean()(0) << ' ' << scaler.mean()(1) << ' ' << scaler.m2()(0)
       << ' ' << scaler.m2()(1) << '\n';
    write_net(os, "actor", actor);
    write_net(os, "critic", critic);
    write_net(os, "qnet", qnet);
    write_net(os, "actor_target", actor_target);
    write_net(os, "critic_target", critic_target);
    write_net(os, "qnet_target", qnet_target);
    os.flags(flags);
    os.precision(precision);
}

PolicyArtifact PolicyArtifact::read(std::istream& is) {
    PolicyArtifact p;
    expect(is, kPolicyMagic);
    if (read_value<int>(is, "version") != kPolicyVersion) throw ContractError("policy artifact: unsupported version");
    expect(is, "dims");
    p.m = read_value<int>(is, "M");
    p.n = read_value<int>(is, "N");
    expect(is, "seed");
    p.seed = read_value<std::uint64_t>(is, "seed");
    expect(is, "ps_watts");
    p.ps_watts = read_value<double>(is, "ps_watts");
    expect(is, "noise_power");
    p.noise_power = read_value<double>(is, "noise_power");
    expect(is, "hyper");
    p.hp.zeta = read_value<double>(is, "zeta");
    p.hp.nu = read_value<double>(is, "nu");
    p.hp.tau_polyak = read_value<double>(is, "tau");
    p.hp.batch = read_value<int>(is, "batch");
    p.hp.target_period = read_value<int>(is, "target period");
    p.hp.episodes = read_value<int>(is, "episodes");
    p.hp.steps_per_episode = read_value<int>(is, "steps");
    p.hp.buffer_capacity = read_value<std::size_t>(is, "buffer capacity");
    p.hp.epsilon_start = read_value<double>(is, "epsilon start");
    p.hp.epsilon_end = read_value<double>(is, "epsilon end");
    p.hp.epsilon_decay_fraction = read_value<double>(is, "epsilon decay");
    p.hp.noise_sigma_start = read_value<double>(is, "noise start");
    p.hp.noise_sigma_end = read_value<double>(is, "noise end");
    expect(is, "scaler");
    const long count = read_value<long>(is, "scaler count");
    Eigen::Vector2d mean, m2;
    mean(0) = read_value<double>(is, "scaler mean");
    mean(1) = read_value<double>(is, "scaler mean");
    m2(0) = read_value<double>(is, "scaler m2");
    m2(1) = read_value<double>(is, "scaler m2");
    p.scaler = FeatureScaler::from_moments(count, mean, m2);
    p.actor = read_net(is, "actor");
    p.critic = read_net(is, "critic");
    p.qnet = read_net(is, "qnet");
    p.actor_target = read_net(is, "actor_target");
    p.critic_target = read_net(is, "critic_target");
    p.qnet_target = read_net(is, "qnet_target");
    p.hp.actor_critic_hidden.assign(p.actor.widths().begin() + 1, p.actor.widths().end() - 1);
    p.hp.q_hidden.assign(p.qnet.widths().begin() + 1, p.qnet.widths().end() - 1);
    if (p.actor.output_size() != p.m * p.m + p.n * p.n || p.qnet.output_size() != config_count(p.m, p.n))
        throw ContractError("policy artifact: network shapes do not match the array dimensions");
    return p;
}

void PolicyArtifact::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ContractError("cannot open '" + path + "' for writing");
    write(os);
    if (!os) throw ContractError("failed writing policy artifact to '" + path + "'");
}

PolicyArtifact PolicyArtifact::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ContractError("cannot open policy artifact '" + path + "'");
    return read(is);
}

void write_training_curve(std::ostream& os, std::span<const TrainingCurveRow> rows) {
    os << "episode,mean_reward,mean_harvested_w,epsilon\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.6g\n", r.episode, r.mean_reward, r.mean_harvested_w,
                      r.epsilon);
        os << buf;
    }
}

// -------------------------------------------------------------- training

TrainResult train(const ChannelParams& chan_params, const PowerBudget& budget, const AgentHyperparams& hp,
                  std::uint64_t seed, const TrainOptions& options) {
    chan_params.validate();
    budget.validate();
    hp.validate();
    if (options.frozen_channel &&
        (options.frozen_channel->m() != chan_params.m || options.frozen_channel->n() != chan_params.n))
        throw ContractError("train: frozen channel does not match the array dimensions");

    const int m = chan_params.m;
    const int n = chan_params.n;
    const double noise = chan_params.noise_power();
    const int action_size = m * m + n * n;
    const int configs = static_cast<int>(config_count(m, n));

    std::mt19937_64 rng(seed);
    AgentNetworks nets = AgentNetworks::create(action_size, configs, hp, rng);
    ReplayBuffer buffer(hp.buffer_capacity);
    FeatureScaler scaler;

    TrainResult result;
    auto snapshot = [&]() {
        PolicyArtifact p;
        p.m = m;
        p.n = n;
        p.seed = seed;
        p.ps_watts = budget.ps;
        p.noise_power = noise;
        p.hp = hp;
        p.scaler = scaler;
        p.actor = nets.actor;
        p.critic = nets.critic;
        p.qnet = nets.qnet;
        p.actor_target = nets.actor_target;
        p.critic_target = nets.critic_target;
        p.qnet_target = nets.qnet_target;
        return p;
    };

    const long total_steps = static_cast<long>(hp.episodes) * hp.steps_per_episode;
    const double decay_steps = std::max(1.0, hp.epsilon_decay_fraction * double(total_steps));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> random_config(0, configs - 1);

    long global = 0;
    try {
        for (int episode = 0; episode < hp.episodes; ++episode) {
            ChannelRealization chan =
                options.frozen_channel ? *options.frozen_channel : sample_channel(chan_params, rng());
            const Environment env(std::move(chan), budget, noise);
            EnvState state = env.initial_state();
            scaler.observe(state);

            double reward_sum = 0.0;
            double harvested_sum = 0.0;
            double epsilon = hp.epsilon_start;
            for (int t = 0; t < hp.steps_per_episode; ++t, ++global) {
                const double progress = total_steps > 1 ? double(global) / double(total_steps - 1) : 1.0;
                const double sigma = hp.noise_sigma_start + (hp.noise_sigma_end - hp.noise_sigma_start) * progress;
                epsilon = double(global) < decay_steps
                              ? hp.epsilon_start + (hp.epsilon_end - hp.epsilon_start) * double(global) / decay_steps
                              : hp.epsilon_end;

                const RMatrix x = scaler.transform(state);
                const RMatrix mu = nets.actor.forward(x);
                EnvAction action;
                action.precoding.resize(static_cast<std::size_t>(action_size));
                for (int k = 0; k < action_size; ++k)
                    action.precoding[static_cast<std::size_t>(k)] = std::clamp(mu(k, 0) + sigma * gauss(rng), 0.0, 1.0);
                if (unit(rng) < epsilon) {
                    action.config = random_config(rng);
                } else {
                    action.config = static_cast<int>(argmax_column(nets.qnet.forward(x), 0));
                }

                const StepOutcome out = env.step(state, action);
                reward_sum += out.reward;
                harvested_sum += out.harvested_watts;
                buffer.push({state, action, out.reward, out.next});
                scaler.observe(out.next);

                if (buffer.size() >= static_cast<std::size_t>(hp.batch)) {
                    const std::vector<Transition> batch = buffer.sample(static_cast<std::size_t>(hp.batch), rng);
                    ddpg_update(batch, scaler, nets, hp);
                    ddqn_update(batch, scaler, nets, hp);
                }
                state = out.next;
            }
            result.curve.push_back({episode + 1, reward_sum / hp.steps_per_episode,
                                    harvested_sum / hp.steps_per_episode, epsilon});
        }
    } catch (...) {
        if (!options.checkpoint_path.empty()) {
            try {
                snapshot().save(options.checkpoint_path);
            } catch (...) {
            }
        }
        throw;
    }
    result.policy = snapshot();
    return result;
}

PolicyRollout evaluate_policy(const PolicyArtifact& policy, const ChannelRealization& chan,
                              const PowerBudget& budget, int steps) {
    if (steps < 1) throw ContractError("evaluate_policy: steps must be >= 1");
    if (chan.m() != policy.m || chan.n() != policy.n)
        throw ContractError("evaluate_policy: channel dimensions do not match the policy");
    const Environment env(chan, budget, policy.noise_power);
    EnvState state = env.initial_state();
    PolicyRollout out;
    for (int t = 0; t < steps; ++t) {
        const StepOutcome o = env.step(state, policy.act(state));
        out.mean_reward += o.reward;
        out.mean_harvested_w += o.harvested_watts;
        state = o.next;
    }
    out.mean_reward /= steps;
    out.mean_harvested_w /= steps;
    out.steps = steps;
    return out;
}

}  // namespace fdswipt
