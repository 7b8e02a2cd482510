#pragma once

#include "kgalign/kgv.hpp"
#include "kgalign/mlp.hpp"

#include <filesystem>
#include <random>
#include <vector>

namespace kgalign {

/// All three heads of one forward pass. KGV values are sigmoid outputs,
/// strictly inside (0, 1).
struct ModelOutputs {
    KgvTensor kgv;
    Eigen::MatrixXd reconstruction; // batch x input_dim, in (0, 1)
    Eigen::MatrixXd class_logits;   // batch x classes
};

struct ModelTrace {
    MlpTrace encoder;
    MlpTrace decoder;
    MlpTrace classifier;
};

struct ModelGrads {
    std::vector<LayerGrads> encoder;
    std::vector<LayerGrads> decoder;
    std::vector<LayerGrads> classifier;
    Eigen::MatrixXd d_kgv; // dL/d kgv values (before the regression term)
};

/// Task loss L_T = mean-per-pixel reconstruction BCE + classification
/// cross-entropy, both averaged over the batch.
struct TaskLoss {
    double value = 0.0;
    double reconstruction_bce = 0.0;
    double classification_ce = 0.0;
    Eigen::MatrixXd d_reconstruction; // dL/d reconstruction (post-sigmoid)
    Eigen::MatrixXd d_logits;         // dL/d logits
    // gradient w.r.t. the decoder's pre-sigmoid output; algebraically
    // d_reconstruction * r(1-r), kept fused so saturated cells stay finite
    Eigen::MatrixXd d_reconstruction_preact;
};

/// Conflict-correction loss L_R: mean BCE over active cells, zero when the
/// mask is empty. The gradient is zero on inactive cells.
struct RegressionLoss {
    double value = 0.0;
    long active_cells = 0;
    Eigen::MatrixXd d_kgv;        // dL/d kgv values
    Eigen::MatrixXd d_kgv_preact; // fused with the encoder sigmoid: (v - t)/n
};

/// The modified autoencoder: an MLP encoder whose sigmoid bottleneck is the
/// KGV tensor, a mirrored decoder and a linear classifier head, both fed
/// from the flattened KGV.
class KgvAutoencoder {
public:
    KgvAutoencoder() = default;

    /// input -> hidden (relu) -> n_r*n_e*n_e (sigmoid); decoder mirrors back
    /// to input (sigmoid); classifier is a single linear layer.
    static KgvAutoencoder make(int input_dim, int hidden_dim, int n_r, int n_e,
                               int classes, std::mt19937_64& rng);

    /// Inputs must lie in [0, 1]. Fills a trace for backward.
    ModelOutputs forward(const Eigen::MatrixXd& images, ModelTrace* trace = nullptr) const;

    /// Combines the decoder path (from dL/d recon pre-activation), the
    /// classifier path (from dL/d logits) and an optional extra gradient on
    /// the encoder's pre-sigmoid KGV output (the fused regression term).
    ModelGrads backward(const ModelTrace& trace, const Eigen::MatrixXd& d_recon_preact,
                        const Eigen::MatrixXd& d_logits,
                        const Eigen::MatrixXd* d_kgv_preact_extra = nullptr) const;

    Mlp& encoder() { return encoder_; }
    Mlp& decoder() { return decoder_; }
    Mlp& classifier() { return classifier_; }
    const Mlp& encoder() const { return encoder_; }
    const Mlp& decoder() const { return decoder_; }
    const Mlp& classifier() const { return classifier_; }

    int n_r() const { return n_r_; }
    int n_e() const { return n_e_; }
    int classes() const { return classifier_.output_dim(); }
    bool parameters_finite() const;

    /// Checkpoint: `<prefix>.json` manifest plus `<prefix>.bin` with every
    /// parameter tensor as little-endian float64, in manifest order.
    void save_checkpoint(const std::filesystem::path& prefix, int epoch,
                         unsigned long long master_seed) const;
    static KgvAutoencoder load_checkpoint(const std::filesystem::path& prefix);

private:
    Mlp encoder_;
    Mlp decoder_;
    Mlp classifier_;
    int n_r_ = 0;
    int n_e_ = 0;
};

TaskLoss task_loss(const ModelOutputs& outputs, const Eigen::MatrixXd& images,
                   const std::vector<int>& labels);

RegressionLoss regression_loss(const KgvTensor& kgv, const TargetMask& mask);

} // namespace kgalign
