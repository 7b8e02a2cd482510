#include "kgalign/mlp.hpp"

#include "kgalign/errors.hpp"

#include <cmath>

namespace kgalign {

namespace {

double sigmoid_scalar(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation act) {
    switch (act) {
    case Activation::Sigmoid:
        return z.unaryExpr([](double v) { return sigmoid_scalar(v); });
    case Activation::Relu:
        return z.cwiseMax(0.0);
    case Activation::Identity:
        return z;
    }
    return z;
}

Mlp::Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {
    for (std::size_t l = 1; l < layers_.size(); ++l) {
        if (layers_[l].weights.cols() != layers_[l - 1].weights.rows()) {
            throw InvalidArgument("Mlp: layer " + std::to_string(l) +
                                  " input dim does not chain with previous layer");
        }
    }
    for (const auto& l : layers_) {
        if (l.biases.size() != l.weights.rows()) {
            throw InvalidArgument("Mlp: bias size does not match weight rows");
        }
    }
}

Mlp Mlp::glorot(const std::vector<int>& dims, const std::vector<Activation>& acts,
                std::mt19937_64& rng) {
    if (dims.size() < 2 || acts.size() != dims.size() - 1) {
        throw InvalidArgument("Mlp::glorot: need n+1 dims for n activations");
    }
    std::vector<Layer> layers;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const int in = dims[l];
        const int out = dims[l + 1];
        const double limit = std::sqrt(6.0 / (in + out));
        std::uniform_real_distribution<double> uni(-limit, limit);
        Layer layer;
        layer.weights.resize(out, in);
        for (int i = 0; i < out; ++i) {
            for (int j = 0; j < in; ++j) layer.weights(i, j) = uni(rng);
        }
        layer.biases = Eigen::VectorXd::Zero(out);
        layer.activation = acts[l];
        layers.push_back(std::move(layer));
    }
    return Mlp(std::move(layers));
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, MlpTrace* trace) const {
    if (layers_.empty()) {
        throw InvalidArgument("Mlp::forward: empty network");
    }
    if (x.cols() != layers_.front().weights.cols()) {
        throw InvalidArgument("Mlp::forward: input has " + std::to_string(x.cols()) +
                              " features, expected " +
                              std::to_string(layers_.front().weights.cols()));
    }
    if (trace) {
        trace->input = x;
        trace->pre.clear();
        trace->post.clear();
    }
    Eigen::MatrixXd a = x;
    for (const auto& layer : layers_) {
        Eigen::MatrixXd z = a * layer.weights.transpose();
        z.rowwise() += layer.biases.transpose();
        a = apply_activation(z, layer.activation);
        if (trace) {
            trace->pre.push_back(std::move(z));
            trace->post.push_back(a);
        }
    }
    return a;
}

std::pair<std::vector<LayerGrads>, Eigen::MatrixXd>
Mlp::backward(const MlpTrace& trace, const Eigen::MatrixXd& upstream,
              bool upstream_is_preact) const {
    const std::size_t n = layers_.size();
    if (trace.pre.size() != n || trace.post.size() != n) {
        throw InvalidArgument("Mlp::backward: trace does not match this network");
    }
    if (upstream.rows() != trace.input.rows() ||
        upstream.cols() != layers_.back().weights.rows()) {
        throw InvalidArgument("Mlp::backward: upstream gradient has wrong shape");
    }

    std::vector<LayerGrads> grads(n);
    Eigen::MatrixXd delta; // dL/d pre-activation of current layer
    for (std::size_t li = n; li-- > 0;) {
        const Layer& layer = layers_[li];
        Eigen::MatrixXd d_post;
        if (li == n - 1) {
            if (upstream_is_preact) {
                delta = upstream;
            } else {
                d_post = upstream;
            }
        }
        if (li != n - 1 || !upstream_is_preact) {
            const Eigen::MatrixXd& src = (li == n - 1) ? d_post : delta;
            switch (layer.activation) {
            case Activation::Sigmoid: {
                const Eigen::MatrixXd& a = trace.post[li];
                delta = src.cwiseProduct(
                    a.cwiseProduct((1.0 - a.array()).matrix()));
                break;
            }
            case Activation::Relu:
                delta = src.cwiseProduct(
                    (trace.pre[li].array() > 0.0).cast<double>().matrix());
                break;
            case Activation::Identity:
                delta = src;
                break;
            }
        }
        const Eigen::MatrixXd& below = li == 0 ? trace.input : trace.post[li - 1];
        grads[li].d_weights = delta.transpose() * below;
        grads[li].d_biases = delta.colwise().sum();
        if (li > 0) {
            delta = (delta * layer.weights).eval(); // becomes d post of layer below
        } else {
            return {std::move(grads), delta * layer.weights};
        }
    }
    return {std::move(grads), Eigen::MatrixXd()};
}

int Mlp::input_dim() const {
    return layers_.empty() ? 0 : static_cast<int>(layers_.front().weights.cols());
}

int Mlp::output_dim() const {
    return layers_.empty() ? 0 : static_cast<int>(layers_.back().weights.rows());
}

long Mlp::parameter_count() const {
    long n = 0;
    for (const auto& l : layers_) n += l.weights.size() + l.biases.size();
    return n;
}

bool Mlp::parameters_finite() const {
    for (const auto& l : layers_) {
        if (!l.weights.allFinite() || !l.biases.allFinite()) return false;
    }
    return true;
}

} // namespace kgalign
