#include "kgalign/adam.hpp"

#include "kgalign/errors.hpp"

#include <cmath>

namespace kgalign {

void AdamState::update(double* params, const double* grad, long count, const AdamConfig& cfg) {
    Eigen::Map<const Eigen::ArrayXd> g(grad, count);
    if (!g.isFinite().all()) {
        throw TrainingDiverged("AdamState::update: non-finite gradient");
    }
    if (t_ == 0) {
        m_ = Eigen::ArrayXd::Zero(count);
        v_ = Eigen::ArrayXd::Zero(count);
    } else if (m_.size() != count) {
        throw InvalidArgument("AdamState::update: tensor size changed between steps");
    }
    ++t_;
    m_ = cfg.beta1 * m_ + (1.0 - cfg.beta1) * g;
    v_ = cfg.beta2 * v_ + (1.0 - cfg.beta2) * g.square();
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    Eigen::Map<Eigen::ArrayXd> p(params, count);
    p -= cfg.learning_rate * (m_ / c1) / ((v_ / c2).sqrt() + cfg.epsilon);
}

void AdamState::update(Eigen::MatrixXd& params, const Eigen::MatrixXd& grad,
                       const AdamConfig& cfg) {
    if (params.rows() != grad.rows() || params.cols() != grad.cols()) {
        throw InvalidArgument("AdamState::update: gradient shape mismatch");
    }
    update(params.data(), grad.data(), params.size(), cfg);
}

void AdamState::update(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
                       const AdamConfig& cfg) {
    if (params.size() != grad.size()) {
        throw InvalidArgument("AdamState::update: gradient shape mismatch");
    }
    update(params.data(), grad.data(), params.size(), cfg);
}

} // namespace kgalign
