// SPDX-License-Identifier: Apache-2.0
//
// fdswipt: full-duplex MIMO energy harvesting / information transfer toolkit
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fdswipt {

using RMatrix = Eigen::MatrixXd;

enum class Activation { Linear, Relu, Sigmoid };

std::string to_string(Activation a);
Activation parse_activation(const std::string& text);

/// Fully connected feed-forward network. Samples are columns: a batch is an
/// (input_size × batch) matrix and the output is (output_size × batch).
class Mlp {
public:
    /// Per-layer parameter gradients, same shapes as the network.
    struct Gradients {
        std::vector<RMatrix> weights;
        std::vector<Eigen::VectorXd> biases;
    };

    /// Activations recorded by a training forward pass.
    struct Tape {
        std::vector<RMatrix> inputs;  ///< input of each layer
        std::vector<RMatrix> outputs; ///< post-activation output of each layer
    };

    Mlp() = default;

    /// `widths` = {in, hidden..., out}; one activation per layer.
    /// Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)); the last layer
    /// uses U(-final_scale, final_scale) when final_scale > 0.
    Mlp(std::vector<int> widths, std::vector<Activation> activations, std::mt19937_64& rng,
        double final_scale = 0.0);

    int input_size() const { return widths_.front(); }
    int output_size() const { return widths_.back(); }
    std::size_t layer_count() const { return weights_.size(); }
    std::size_t parameter_count() const;
    const std::vector<int>& widths() const { return widths_; }
    const std::vector<Activation>& activations() const { return activations_; }

    RMatrix forward(const RMatrix& x) const;
    RMatrix forward(const RMatrix& x, Tape& tape) const;

    /// Backpropagates dL/d(output). Returns dL/d(input); accumulates nothing,
    /// `grads` is overwritten when non-null.
    RMatrix backward(const Tape& tape, const RMatrix& grad_output, Gradients* grads) const;

    Gradients zero_gradients() const;

    /// Row-major weights then bias, layer by layer.
    std::vector<double> parameters() const;
    void set_parameters(const std::vector<double>& flat);

    /// θ ← τ·θ_source + (1-τ)·θ. τ = 1 copies exactly.
    void blend_from(const Mlp& source, double tau);

    bool same_shape(const Mlp& other) const;
    bool all_finite() const;

    std::vector<RMatrix>& weights() { return weights_; }
    std::vector<Eigen::VectorXd>& biases() { return biases_; }
    const std::vector<RMatrix>& weights() const { return weights_; }
    const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

    /// Used by the artifact reader; shapes must be consistent with `widths`.
    static Mlp from_parts(std::vector<int> widths, std::vector<Activation> activations,
                          const std::vector<double>& flat);

private:
    std::vector<int> widths_;
    std::vector<Activation> activations_;
    std::vector<RMatrix> weights_;
    std::vector<Eigen::VectorXd> biases_;
};

/// Adam with bias correction, minimizing.
class Adam {
public:
    Adam() = default;
    Adam(const Mlp& net, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    void step(Mlp& net, const Mlp::Gradients& grads);
    long steps() const { return t_; }
    double learning_rate() const { return lr_; }

private:
    double lr_ = 1e-3;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
    long t_ = 0;
    Mlp::Gradients m_;
    Mlp::Gradients v_;
};

}  // namespace fdswipt
