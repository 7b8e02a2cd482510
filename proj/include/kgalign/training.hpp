#pragma once

#include "kgalign/adam.hpp"
#include "kgalign/alignment.hpp"
#include "kgalign/kg.hpp"
#include "kgalign/mnist.hpp"
#include "kgalign/model.hpp"
#include "kgalign/vsa.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace kgalign {

/// Hyperparameters of the joint run. Loss weights default to 1.0; setting
/// one to 0 removes that loss exactly (its gradient path is skipped, not
/// just scaled).
struct TrainConfig {
    int epochs = 10;
    int batch_size = 128;
    double learning_rate_net = 1e-3;
    double learning_rate_vsa = 1e-2;
    std::uint64_t master_seed = 1;
    int dimension = 1024;
    int nn_entities = 28;
    int nn_relations = 1;
    int hidden_dim = 256;
    int input_dim = 784;
    int classes = 10;
    double w_lk = 1.0;
    double w_lr1 = 1.0;
    double w_lr2 = 1.0;
    double w_lr = 1.0;
    double w_lt = 1.0;
    /// The concept mapping is meaningless before any VSA training, so the
    /// conflict-correction loss waits until this (1-based) epoch.
    int regression_start_epoch = 2;
    double threshold = 0.5;
    /// Label y maps to this human-graph entity name.
    std::vector<std::string> class_entities = {"zero", "one", "two",   "three", "four",
                                               "five", "six", "seven", "eight", "nine"};

    void validate() const;
    nlohmann::ordered_json to_json() const;
    static TrainConfig from_json(const nlohmann::ordered_json& j);
    static TrainConfig load(const std::filesystem::path& path);
};

struct StepMetrics {
    double l_k = 0.0;
    double l_r1 = 0.0;         // pair-averaged (optimized value)
    double l_r2 = 0.0;         // component-averaged
    double l_r1_literal = 0.0; // n_NN-normalized, as reported
    double l_r2_literal = 0.0;
    double l_r = 0.0;
    double l_t = 0.0;
    long matches = 0;
    int empty_samples = 0; // samples with no asserted triplet this step

    double total() const { return l_k + l_r1 + l_r2 + l_r + l_t; }
};

struct EpochMetrics {
    int epoch = 0;
    double l_k = 0.0;
    double l_r1 = 0.0; // literal normalization, matching the written formula
    double l_r2 = 0.0;
    double l_r = 0.0;
    double l_t = 0.0;
    double consistency = 0.0;
    double similarity = 0.0;
    double bipolar_loss = 0.0;
    double test_accuracy = 0.0;
};

struct Batch {
    Eigen::MatrixXd images;
    std::vector<int> labels;
};

struct TrainState {
    TrainConfig cfg;
    KgvAutoencoder model;
    VsaSpace vsa_nn;
    Eigen::MatrixXd g_encodings;          // D x |T_G|, frozen human triplets
    std::vector<TripletIdx> g_triplets;   // symbol indices into vsa_g
    Eigen::VectorXd g_norms;              // encoding norms, frozen
    std::vector<int> class_entity;        // label -> kg_g entity index
    SigmaIndex sigma;
    bool sigma_valid = false;
    AdamState vsa_adam;
    std::vector<AdamState> net_adam; // one per parameter tensor, model order
    long step = 0;
    int epoch = 0;
    std::vector<EpochMetrics> history;

    TrainState(TrainConfig c, KgvAutoencoder m, VsaSpace nn)
        : cfg(std::move(c)), model(std::move(m)), vsa_nn(std::move(nn)) {}
};

TrainState init_train_state(const TrainConfig& cfg, const KnowledgeGraph& kg_g,
                            const VsaSpace& vsa_g);

/// Builds the frozen human-side space for a graph under the config seed.
VsaSpace build_vsa_g(const TrainConfig& cfg, const KnowledgeGraph& kg_g);

/// One optimization step: forward, per-sample triplet matching, VSA losses
/// into the symbol vectors, conflict correction and task losses through the
/// network, then both Adam updates. The VSA losses never touch network
/// weights and the network losses never touch symbol vectors. Throws
/// TrainingDiverged when the combined loss turns non-finite.
StepMetrics train_step(TrainState& state, const Batch& batch, const KnowledgeGraph& kg_g,
                       const VsaSpace& vsa_g);

struct EvalResult {
    double accuracy = 0.0;
    double reconstruction_bce = 0.0;
    double consistency = 0.0;
    double similarity = 0.0;
    double bipolar_loss = 0.0;
    AlignmentReport report;
};

/// Test-set accuracy and reconstruction error plus the current concept
/// alignment. Throws InvalidArgument on an empty test set.
EvalResult evaluate(const TrainState& state, const MnistDataset& test, const VsaSpace& vsa_g);

/// Full training run: per-epoch sigma refresh (from regression_start_epoch
/// on), batched steps, evaluation after every epoch.
TrainState run_training(const TrainConfig& cfg, const KnowledgeGraph& kg_g,
                        const VsaSpace& vsa_g, const MnistDataset& train,
                        const MnistDataset& test,
                        const std::function<void(const EpochMetrics&)>& on_epoch = {});

void write_metrics_csv(const std::vector<EpochMetrics>& history,
                       const std::filesystem::path& path);

std::uint64_t checksum_network(const KgvAutoencoder& model);
std::uint64_t checksum_symbols(const VsaSpace& space);

// ---------------------------------------------------------------------------
// VSA-only alignment (the synthetic experiments; no neural network — the
// KGV comes straight from the network-side graph's own triplets)

struct VsaAlignConfig {
    int dimension = 1024;
    int epochs = 10;
    /// Matching is recomputed at each epoch boundary; the epochs then take
    /// this many optimizer steps against the fixed pairing.
    int steps_per_epoch = 40;
    double learning_rate = 1e-2;
    double w_lk = 1.0;
    double w_lr1 = 1.0;
    double w_lr2 = 1.0;
    std::uint64_t seed = 1;
};

struct VsaAlignResult {
    AlignmentReport report;
    std::vector<double> l_k_per_epoch;   // mean over the epoch's steps
    std::vector<double> l_vsa_per_epoch; // L_K + L_R1 + L_R2, same averaging
    VsaSpace vsa_nn;
    VsaSpace vsa_g;
};

VsaAlignResult align_vsa(const KnowledgeGraph& kg_g, const KnowledgeGraph& kg_nn,
                         const VsaAlignConfig& cfg);

} // namespace kgalign
