// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#include "fdswipt/mlp.hpp"

#include <cmath>
#include <sstream>

#include "fdswipt/numerics.hpp"

namespace fdswipt {

std::string to_string(Activation a) {
    switch (a) {
        case Activation::Linear: return "linear";
        case Activation::Relu: return "relu";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "linear";
}

Activation parse_activation(const std::string& text) {
    if (text == "linear") return Activation::Linear;
    if (text == "relu") return Activation::Relu;
    if (text == "sigmoid") return Activation::Sigmoid;
    throw ContractError("unknown activation '" + text + "'");
}

namespace {

void apply(Activation a, RMatrix& z) {
    switch (a) {
        case Activation::Linear: break;
        case Activation::Relu: z = z.cwiseMax(0.0); break;
        case Activation::Sigmoid: z = (1.0 + (-z.array()).exp()).inverse().matrix(); break;
    }
}

// dL/dz from dL/da, expressed through the activation output a.
RMatrix local_gradient(Activation act, const RMatrix& out, const RMatrix& grad) {
    switch (act) {
        case Activation::Linear: return grad;
        case Activation::Relu: return (out.array() > 0.0).select(grad, 0.0);
        case Activation::Sigmoid: return (grad.array() * out.array() * (1.0 - out.array())).matrix();
    }
    return grad;
}

void check_layout(const std::vector<int>& widths, const std::vector<Activation>& activations) {
    if (widths.size() < 2) throw ContractError("Mlp: need at least input and output widths");
    if (activations.size() != widths.size() - 1) throw ContractError("Mlp: one activation per layer required");
    for (int w : widths)
        if (w < 1) throw ContractError("Mlp: layer widths must be >= 1");
}

}  // namespace

Mlp::Mlp(std::vector<int> widths, std::vector<Activation> activations, std::mt19937_64& rng, double final_scale)
    : widths_(std::move(widths)), activations_(std::move(activations)) {
    check_layout(widths_, activations_);
    const std::size_t layers = widths_.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        const int in = widths_[l];
        const int out = widths_[l + 1];
        const double bound = (l + 1 == layers && final_scale > 0.0) ? final_scale : 1.0 / std::sqrt(double(in));
        std::uniform_real_distribution<double> u(-bound, bound);
        RMatrix w(out, in);
        for (int r = 0; r < out; ++r)
            for (int c = 0; c < in; ++c) w(r, c) = u(rng);
        Eigen::VectorXd b(out);
        for (int r = 0; r < out; ++r) b(r) = u(rng);
        weights_.push_back(std::move(w));
        biases_.push_back(std::move(b));
    }
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
}

RMatrix Mlp::forward(const RMatrix& x) const {
    if (x.rows() != input_size()) throw ContractError("Mlp::forward: input width mismatch");
    RMatrix a = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        RMatrix z = weights_[l] * a;
        z.colwise() += biases_[l];
        apply(activations_[l], z);
        a = std::move(z);
    }
    return a;
}

RMatrix Mlp::forward(const RMatrix& x, Tape& tape) const {
    if (x.rows() != input_size()) throw ContractError("Mlp::forward: input width mismatch");
    tape.inputs.clear();
    tape.outputs.clear();
    RMatrix a = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        tape.inputs.push_back(a);
        RMatrix z = weights_[l] * a;
        z.colwise() += biases_[l];
        apply(activations_[l], z);
        tape.outputs.push_back(z);
        a = std::move(z);
    }
    return a;
}

RMatrix Mlp::backward(const Tape& tape, const RMatrix& grad_output, Gradients* grads) const {
    if (tape.outputs.size() != weights_.size()) throw ContractError("Mlp::backward: tape does not match network");
    if (grads) *grads = zero_gradients();
    RMatrix grad = grad_output;
    for (std::size_t k = weights_.size(); k-- > 0;) {
        const RMatrix delta = local_gradient(activations_[k], tape.outputs[k], grad);
        if (grads) {
            grads->weights[k].noalias() = delta * tape.inputs[k].transpose();
            grads->biases[k] = delta.rowwise().sum();
        }
        grad.noalias() = weights_[k].transpose() * delta;
    }
    return grad;
}

Mlp::Gradients Mlp::zero_gradients() const {
    Gradients g;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        g.weights.push_back(RMatrix::Zero(weights_[l].rows(), weights_[l].cols()));
        g.biases.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
    }
    return g;
}

std::vector<double> Mlp::parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (Eigen::Index r = 0; r < weights_[l].rows(); ++r)
            for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) flat.push_back(weights_[l](r, c));
        for (Eigen::Index r = 0; r < biases_[l].size(); ++r) flat.push_back(biases_[l](r));
    }
    return flat;
}

void Mlp::set_parameters(const std::vector<double>& flat) {
    if (flat.size() != parameter_count()) {
        std::ostringstream os;
        os << "Mlp::set_parameters: expected " << parameter_count() << " values, got " << flat.size();
        throw ContractError(os.str());
    }
    std::size_t i = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (Eigen::Index r = 0; r < weights_[l].rows(); ++r)
            for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) weights_[l](r, c) = flat[i++];
        for (Eigen::Index r = 0; r < biases_[l].size(); ++r) biases_[l](r) = flat[i++];
    }
}

void Mlp::blend_from(const Mlp& source, double tau) {
    if (!(tau > 0.0 && tau <= 1.0)) throw ContractError("Mlp::blend_from: tau must lie in (0,1]");
    if (!same_shape(source)) throw ContractError("Mlp::blend_from: shape mismatch");
    if (tau == 1.0) {
        weights_ = source.weights_;
        biases_ = source.biases_;
        return;
    }
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        weights_[l] = tau * source.weights_[l] + (1.0 - tau) * weights_[l];
        biases_[l] = tau * source.biases_[l] + (1.0 - tau) * biases_[l];
    }
}

bool Mlp::same_shape(const Mlp& other) const {
    return widths_ == other.widths_ && activations_ == other.activations_;
}

bool Mlp::all_finite() const {
    for (std::size_t l = 0; l < weights_.size(); ++l)
        if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
    return true;
}

Mlp Mlp::from_parts(std::vector<int> widths, std::vector<Activation> activations, const std::vector<double>& flat) {
    check_layout(widths, activations);
    Mlp net;
    net.widths_ = std::move(widths);
    net.activations_ = std::move(activations);
    for (std::size_t l = 0; l + 1 < net.widths_.size(); ++l) {
        net.weights_.push_back(RMatrix::Zero(net.widths_[l + 1], net.widths_[l]));
        net.biases_.push_back(Eigen::VectorXd::Zero(net.widths_[l + 1]));
    }
    net.set_parameters(flat);
    return net;
}

Adam::Adam(const Mlp& net, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps), m_(net.zero_gradients()),
      v_(net.zero_gradients()) {
    if (!(learning_rate > 0.0)) throw ContractError("Adam: learning rate must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
        throw ContractError("Adam: betas must lie in [0,1)");
}

void Adam::step(Mlp& net, const Mlp::Gradients& grads) {
    if (grads.weights.size() != m_.weights.size()) throw ContractError("Adam::step: gradient layout mismatch");
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, double(t_));
    const double c2 = 1.0 - std::pow(beta2_, double(t_));
    auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
        m = beta1_ * m + (1.0 - beta1_) * g;
        v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
        param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
    };
    for (std::size_t l = 0; l < grads.weights.size(); ++l) {
        update(net.weights()[l], grads.weights[l], m_.weights[l], v_.weights[l]);
        update(net.biases()[l], grads.biases[l], m_.biases[l], v_.biases[l]);
    }
}

}  // namespace fdswipt
