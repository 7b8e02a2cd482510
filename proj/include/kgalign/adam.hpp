#pragma once

#include <Eigen/Core>

namespace kgalign {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Bias-corrected Adam for one parameter tensor. Throws TrainingDiverged on
/// a non-finite gradient.
class AdamState {
public:
    void update(double* params, const double* grad, long count, const AdamConfig& cfg);

    void update(Eigen::MatrixXd& params, const Eigen::MatrixXd& grad, const AdamConfig& cfg);
    void update(Eigen::VectorXd& params, const Eigen::VectorXd& grad, const AdamConfig& cfg);

    long step_count() const { return t_; }

private:
    Eigen::ArrayXd m_;
    Eigen::ArrayXd v_;
    long t_ = 0;
};

} // namespace kgalign
