#pragma once

#include <Eigen/Core>

#include <random>
#include <vector>

namespace kgalign {

enum class Activation { Sigmoid, Relu, Identity };

/// One dense layer: out = act(x * W^T + b). Weights are [out][in].
struct Layer {
    Eigen::MatrixXd weights;
    Eigen::VectorXd biases;
    Activation activation = Activation::Identity;
};

/// Per-layer pre-activations and activations for one batch, retained for
/// backpropagation.
struct MlpTrace {
    Eigen::MatrixXd input;
    std::vector<Eigen::MatrixXd> pre;
    std::vector<Eigen::MatrixXd> post;
};

struct LayerGrads {
    Eigen::MatrixXd d_weights;
    Eigen::VectorXd d_biases;
};

class Mlp {
public:
    Mlp() = default;
    explicit Mlp(std::vector<Layer> layers);

    /// Glorot-uniform weights, zero biases; deterministic from the rng.
    static Mlp glorot(const std::vector<int>& dims, const std::vector<Activation>& acts,
                      std::mt19937_64& rng);

    /// Rows are samples. Pass a trace to retain what backward needs.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& x, MlpTrace* trace = nullptr) const;

    /// Backpropagates `upstream` (dL/d output, or dL/d pre-activation of the
    /// last layer when `upstream_is_preact`). Returns per-layer gradients and
    /// dL/d input. Throws InvalidArgument on a trace from a different shape.
    std::pair<std::vector<LayerGrads>, Eigen::MatrixXd>
    backward(const MlpTrace& trace, const Eigen::MatrixXd& upstream,
             bool upstream_is_preact = false) const;

    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& layers() { return layers_; }
    int input_dim() const;
    int output_dim() const;
    long parameter_count() const;
    bool parameters_finite() const;

private:
    std::vector<Layer> layers_;
};

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation act);

} // namespace kgalign
