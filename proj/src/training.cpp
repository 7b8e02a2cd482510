#include "kgalign/training.hpp"

#include "kgalign/errors.hpp"
#include "kgalign/seeds.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace kgalign {

void TrainConfig::validate() const {
    if (epochs < 1) throw InvalidArgument("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw InvalidArgument("TrainConfig: batch_size must be >= 1");
    if (learning_rate_net <= 0.0 || learning_rate_vsa <= 0.0) {
        throw InvalidArgument("TrainConfig: learning rates must be > 0");
    }
    if (dimension < 1) throw InvalidArgument("TrainConfig: dimension must be >= 1");
    if (nn_entities < 1 || nn_relations < 1) {
        throw InvalidArgument("TrainConfig: network concept counts must be >= 1");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw InvalidArgument("TrainConfig: threshold must lie in (0, 1)");
    }
    if (w_lk < 0 || w_lr1 < 0 || w_lr2 < 0 || w_lr < 0 || w_lt < 0) {
        throw InvalidArgument("TrainConfig: loss weights must be >= 0");
    }
}

nlohmann::ordered_json TrainConfig::to_json() const {
    nlohmann::ordered_json j;
    j["epochs"] = epochs;
    j["batch_size"] = batch_size;
    j["learning_rate_net"] = learning_rate_net;
    j["learning_rate_vsa"] = learning_rate_vsa;
    j["master_seed"] = master_seed;
    j["dimension"] = dimension;
    j["nn_entities"] = nn_entities;
    j["nn_relations"] = nn_relations;
    j["hidden_dim"] = hidden_dim;
    j["weights"] = {{"l_k", w_lk}, {"l_r1", w_lr1}, {"l_r2", w_lr2}, {"l_r", w_lr}, {"l_t", w_lt}};
    j["regression_start_epoch"] = regression_start_epoch;
    j["threshold"] = threshold;
    j["class_entities"] = class_entities;
    return j;
}

TrainConfig TrainConfig::from_json(const nlohmann::ordered_json& j) {
    TrainConfig c;
    try {
        if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
        if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<int>();
        if (j.contains("learning_rate_net")) c.learning_rate_net = j.at("learning_rate_net").get<double>();
        if (j.contains("learning_rate_vsa")) c.learning_rate_vsa = j.at("learning_rate_vsa").get<double>();
        if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("dimension")) c.dimension = j.at("dimension").get<int>();
        if (j.contains("nn_entities")) c.nn_entities = j.at("nn_entities").get<int>();
        if (j.contains("nn_relations")) c.nn_relations = j.at("nn_relations").get<int>();
        if (j.contains("hidden_dim")) c.hidden_dim = j.at("hidden_dim").get<int>();
        if (j.contains("weights")) {
            const auto& w = j.at("weights");
            if (w.contains("l_k")) c.w_lk = w.at("l_k").get<double>();
            if (w.contains("l_r1")) c.w_lr1 = w.at("l_r1").get<double>();
            if (w.contains("l_r2")) c.w_lr2 = w.at("l_r2").get<double>();
            if (w.contains("l_r")) c.w_lr = w.at("l_r").get<double>();
            if (w.contains("l_t")) c.w_lt = w.at("l_t").get<double>();
        }
        if (j.contains("regression_start_epoch")) {
            c.regression_start_epoch = j.at("regression_start_epoch").get<int>();
        }
        if (j.contains("threshold")) c.threshold = j.at("threshold").get<double>();
        if (j.contains("class_entities")) {
            c.class_entities = j.at("class_entities").get<std::vector<std::string>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw KgParseError(std::string("TrainConfig: malformed JSON: ") + e.what());
    }
    c.validate();
    return c;
}

TrainConfig TrainConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw KgParseError("TrainConfig: cannot open '" + path.string() + "'");
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw KgParseError(std::string("TrainConfig: parse failure: ") + e.what());
    }
    return from_json(j);
}

VsaSpace build_vsa_g(const TrainConfig& cfg, const KnowledgeGraph& kg_g) {
    std::mt19937_64 rng(derive_seed(cfg.master_seed, seed_tag::kVsaG));
    return VsaSpace::random_frozen("vsa_g", cfg.dimension, kg_g.entities(), kg_g.relations(),
                                   rng);
}

namespace {

/// Symbol-index form of a graph triplet for a space built entities-first.
TripletIdx to_symbol_triplet(const Triplet& t, int entity_count) {
    return TripletIdx{t.head, entity_count + t.relation, t.tail};
}

} // namespace

TrainState init_train_state(const TrainConfig& cfg, const KnowledgeGraph& kg_g,
                            const VsaSpace& vsa_g) {
    cfg.validate();
    std::mt19937_64 net_rng(derive_seed(cfg.master_seed, seed_tag::kNetwork));
    std::mt19937_64 vsa_rng(derive_seed(cfg.master_seed, seed_tag::kVsaNn));

    KgvAutoencoder model = KgvAutoencoder::make(cfg.input_dim, cfg.hidden_dim, cfg.nn_relations,
                                                cfg.nn_entities, cfg.classes, net_rng);
    VsaSpace vsa_nn = VsaSpace::random_trainable("vsa_nn", cfg.dimension, cfg.nn_entities,
                                                 cfg.nn_relations, vsa_g, vsa_rng);

    TrainState st(cfg, std::move(model), std::move(vsa_nn));

    st.g_triplets.reserve(kg_g.triplets().size());
    st.g_encodings.resize(cfg.dimension, static_cast<Eigen::Index>(kg_g.triplets().size()));
    st.g_norms.resize(static_cast<Eigen::Index>(kg_g.triplets().size()));
    for (std::size_t i = 0; i < kg_g.triplets().size(); ++i) {
        const TripletIdx ts = to_symbol_triplet(kg_g.triplets()[i], kg_g.entity_count());
        st.g_triplets.push_back(ts);
        st.g_encodings.col(static_cast<Eigen::Index>(i)) = encode_triplet_idx(vsa_g, ts);
        st.g_norms[static_cast<Eigen::Index>(i)] =
            st.g_encodings.col(static_cast<Eigen::Index>(i)).norm();
    }

    st.class_entity.reserve(cfg.class_entities.size());
    for (const auto& name : cfg.class_entities) {
        st.class_entity.push_back(kg_g.entity_index(name));
    }

    st.sigma.entity.assign(static_cast<std::size_t>(cfg.nn_entities), -1);
    st.sigma.relation.assign(static_cast<std::size_t>(cfg.nn_relations), -1);

    // one Adam state per parameter tensor: (W, b) per layer, encoder then
    // decoder then classifier
    const std::size_t tensors = 2 * (st.model.encoder().layers().size() +
                                     st.model.decoder().layers().size() +
                                     st.model.classifier().layers().size());
    st.net_adam.resize(tensors);
    return st;
}

namespace {

void apply_net_update(TrainState& st, const ModelGrads& grads) {
    const AdamConfig cfg{st.cfg.learning_rate_net, 0.9, 0.999, 1e-8};
    std::size_t t = 0;
    auto apply = [&](Mlp& net, const std::vector<LayerGrads>& g) {
        for (std::size_t l = 0; l < net.layers().size(); ++l) {
            st.net_adam[t++].update(net.layers()[l].weights, g[l].d_weights, cfg);
            st.net_adam[t++].update(net.layers()[l].biases, g[l].d_biases, cfg);
        }
    };
    apply(st.model.encoder(), grads.encoder);
    apply(st.model.decoder(), grads.decoder);
    apply(st.model.classifier(), grads.classifier);
}

} // namespace

StepMetrics train_step(TrainState& st, const Batch& batch, const KnowledgeGraph& kg_g,
                       const VsaSpace& vsa_g) {
    const TrainConfig& cfg = st.cfg;
    if (batch.images.rows() != static_cast<Eigen::Index>(batch.labels.size())) {
        throw InvalidArgument("train_step: image/label count mismatch");
    }

    StepMetrics metrics;

    // (1) forward
    ModelTrace trace;
    ModelOutputs out = st.model.forward(batch.images, &trace);

    // (2) VSA losses; gradients accumulate into the symbol matrix only
    const bool vsa_on = cfg.w_lk > 0.0 || cfg.w_lr1 > 0.0 || cfg.w_lr2 > 0.0;
    Eigen::MatrixXd vsa_grad;
    if (vsa_on) {
        vsa_grad = Eigen::MatrixXd::Zero(st.vsa_nn.dimension(), st.vsa_nn.symbol_count());
        if (cfg.w_lk > 0.0 && !st.g_triplets.empty()) {
            const TripletCosineTables tables(st.vsa_nn, vsa_g);
            const int n_g = static_cast<int>(st.g_triplets.size());
            std::vector<MatchedTriplet> matches;
            std::vector<TripletIdx> nn_idx;
            for (Eigen::Index a = 0; a < batch.images.rows(); ++a) {
                const auto trips = kgv_to_triplets(out.kgv, static_cast<int>(a), cfg.threshold);
                if (trips.empty()) {
                    ++metrics.empty_samples;
                    continue;
                }
                nn_idx.clear();
                nn_idx.reserve(trips.size());
                Eigen::MatrixXd cost(static_cast<Eigen::Index>(trips.size()), n_g);
                for (std::size_t i = 0; i < trips.size(); ++i) {
                    const TripletIdx ti{trips[i].head, cfg.nn_entities + trips[i].relation,
                                        trips[i].tail};
                    nn_idx.push_back(ti);
                    const double nn_norm = std::sqrt(tables.nn_norm2(ti));
                    for (int j = 0; j < n_g; ++j) {
                        cost(static_cast<Eigen::Index>(i), j) =
                            1.0 - tables.dot(ti, st.g_triplets[static_cast<std::size_t>(j)]) /
                                      (nn_norm * st.g_norms[j]);
                    }
                }
                const Assignment a_s = hungarian(cost, HungarianOptions{.lexicographic = false});
                for (const auto& [i, j] : a_s.pairs) {
                    matches.push_back(MatchedTriplet{nn_idx[static_cast<std::size_t>(i)], j});
                }
            }
            const VsaLoss lk = loss_k(st.vsa_nn, matches, st.g_encodings);
            metrics.l_k = lk.value;
            metrics.matches = static_cast<long>(matches.size());
            if (!lk.empty_assignment) {
                vsa_grad += cfg.w_lk * lk.grad;
            }
        }
        if (cfg.w_lr1 > 0.0) {
            const VsaLoss r1 = loss_r1(st.vsa_nn);
            metrics.l_r1 = r1.value;
            metrics.l_r1_literal = r1.literal;
            vsa_grad += cfg.w_lr1 * r1.grad;
        }
        if (cfg.w_lr2 > 0.0) {
            const VsaLoss r2 = loss_r2(st.vsa_nn);
            metrics.l_r2 = r2.value;
            metrics.l_r2_literal = r2.literal;
            vsa_grad += cfg.w_lr2 * r2.grad;
        }
    }

    // (4) conflict correction into the KGV path (sigma refreshes per epoch)
    Eigen::MatrixXd d_kgv_extra;
    if (cfg.w_lr > 0.0 && st.sigma_valid) {
        const TargetMask mask = build_conflict_targets(kg_g, st.sigma, batch.labels,
                                                       st.class_entity, out.kgv.n_r, out.kgv.n_e);
        const RegressionLoss lr = regression_loss(out.kgv, mask);
        metrics.l_r = lr.value;
        if (lr.active_cells > 0) {
            d_kgv_extra = cfg.w_lr * lr.d_kgv_preact;
        }
    }

    // (5) task loss
    TaskLoss lt;
    const bool task_on = cfg.w_lt > 0.0;
    if (task_on) {
        lt = task_loss(out, batch.images, batch.labels);
        metrics.l_t = lt.value;
    }

    if (!std::isfinite(metrics.total())) {
        throw TrainingDiverged("train_step: non-finite loss at epoch " +
                               std::to_string(st.epoch) + " step " + std::to_string(st.step) +
                               " (L_K=" + std::to_string(metrics.l_k) +
                               ", L_R=" + std::to_string(metrics.l_r) +
                               ", L_T=" + std::to_string(metrics.l_t) + ")");
    }

    // (6) backward through the network, (7) both parameter updates
    const bool net_on = task_on || d_kgv_extra.size() > 0;
    if (net_on) {
        Eigen::MatrixXd d_recon_preact =
            task_on ? (cfg.w_lt * lt.d_reconstruction_preact).eval()
                    : Eigen::MatrixXd::Zero(batch.images.rows(), batch.images.cols());
        Eigen::MatrixXd d_logits =
            task_on ? (cfg.w_lt * lt.d_logits).eval()
                    : Eigen::MatrixXd::Zero(batch.images.rows(), st.model.classes());
        const Eigen::MatrixXd* extra = d_kgv_extra.size() > 0 ? &d_kgv_extra : nullptr;
        const ModelGrads grads = st.model.backward(trace, d_recon_preact, d_logits, extra);
        apply_net_update(st, grads);
    }
    if (vsa_on) {
        st.vsa_adam.update(st.vsa_nn.mutable_symbols().data(), vsa_grad.data(), vsa_grad.size(),
                           AdamConfig{cfg.learning_rate_vsa, 0.9, 0.999, 1e-8});
    }

    ++st.step;
    return metrics;
}

EvalResult evaluate(const TrainState& st, const MnistDataset& test, const VsaSpace& vsa_g) {
    if (test.count == 0) {
        throw InvalidArgument("evaluate: empty test set");
    }
    EvalResult res;
    std::vector<int> order(static_cast<std::size_t>(test.count));
    std::iota(order.begin(), order.end(), 0);

    long correct = 0;
    double bce_sum = 0.0;
    const int bs = std::max(1, st.cfg.batch_size);
    for (int first = 0; first < test.count; first += bs) {
        const int n = std::min(bs, test.count - first);
        std::vector<int> labels;
        const Eigen::MatrixXd images = test.batch(order, first, n, &labels);
        const ModelOutputs out = st.model.forward(images);
        for (int i = 0; i < n; ++i) {
            int arg = 0;
            out.class_logits.row(i).maxCoeff(&arg);
            if (arg == labels[static_cast<std::size_t>(i)]) ++correct;
        }
        const TaskLoss lt = task_loss(out, images, labels);
        bce_sum += lt.reconstruction_bce * n;
    }
    res.accuracy = static_cast<double>(correct) / test.count;
    res.reconstruction_bce = bce_sum / test.count;

    res.report = concept_match(st.vsa_nn, vsa_g);
    res.consistency = res.report.consistency;
    res.similarity = res.report.similarity;
    res.bipolar_loss = res.report.bipolar_loss;
    return res;
}

TrainState run_training(const TrainConfig& cfg, const KnowledgeGraph& kg_g,
                        const VsaSpace& vsa_g, const MnistDataset& train,
                        const MnistDataset& test,
                        const std::function<void(const EpochMetrics&)>& on_epoch) {
    cfg.validate();
    if (train.count == 0) throw InvalidArgument("run_training: empty training set");

    TrainState st = init_train_state(cfg, kg_g, vsa_g);
    std::mt19937_64 shuffle_rng(derive_seed(cfg.master_seed, seed_tag::kShuffle));

    std::vector<int> order(static_cast<std::size_t>(train.count));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        st.epoch = epoch;
        if (epoch >= cfg.regression_start_epoch) {
            const AlignmentReport report = concept_match(st.vsa_nn, vsa_g);
            st.sigma = to_sigma_index(report, st.vsa_nn, kg_g);
            st.sigma_valid = true;
        }
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        StepMetrics sums;
        int steps = 0;
        for (int first = 0; first < train.count; first += cfg.batch_size) {
            const int n = std::min(cfg.batch_size, train.count - first);
            Batch batch;
            batch.images = train.batch(order, first, n, &batch.labels);
            const StepMetrics m = train_step(st, batch, kg_g, vsa_g);
            sums.l_k += m.l_k;
            sums.l_r1_literal += m.l_r1_literal;
            sums.l_r2_literal += m.l_r2_literal;
            sums.l_r += m.l_r;
            sums.l_t += m.l_t;
            ++steps;
        }
        if (!st.model.parameters_finite()) {
            throw TrainingDiverged("run_training: non-finite network parameters after epoch " +
                                   std::to_string(epoch));
        }

        const EvalResult ev = evaluate(st, test, vsa_g);
        EpochMetrics em;
        em.epoch = epoch;
        em.l_k = sums.l_k / steps;
        em.l_r1 = sums.l_r1_literal / steps;
        em.l_r2 = sums.l_r2_literal / steps;
        em.l_r = sums.l_r / steps;
        em.l_t = sums.l_t / steps;
        em.consistency = ev.consistency;
        em.similarity = ev.similarity;
        em.bipolar_loss = ev.bipolar_loss;
        em.test_accuracy = ev.accuracy;
        st.history.push_back(em);
        if (on_epoch) on_epoch(em);
    }
    return st;
}

void write_metrics_csv(const std::vector<EpochMetrics>& history,
                       const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary); // LF line endings everywhere
    if (!out) throw Error("write_metrics_csv: cannot open '" + path.string() + "'");
    out << "epoch,L_K,L_R1,L_R2,L_R,L_T,consistency,similarity,bipolar_loss,test_accuracy\n";
    char buf[64];
    auto put = [&](double v, bool last = false) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf << (last ? "\n" : ",");
    };
    for (const auto& m : history) {
        out << m.epoch << ",";
        put(m.l_k);
        put(m.l_r1);
        put(m.l_r2);
        put(m.l_r);
        put(m.l_t);
        put(m.consistency);
        put(m.similarity);
        put(m.bipolar_loss);
        put(m.test_accuracy, true);
    }
}

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;

} // namespace

std::uint64_t checksum_network(const KgvAutoencoder& model) {
    std::uint64_t h = kFnvOffset;
    for (const Mlp* net : {&model.encoder(), &model.decoder(), &model.classifier()}) {
        for (const auto& l : net->layers()) {
            h = fnv1a(l.weights.data(), sizeof(double) * static_cast<std::size_t>(l.weights.size()), h);
            h = fnv1a(l.biases.data(), sizeof(double) * static_cast<std::size_t>(l.biases.size()), h);
        }
    }
    return h;
}

std::uint64_t checksum_symbols(const VsaSpace& space) {
    return fnv1a(space.symbols().data(),
                 sizeof(double) * static_cast<std::size_t>(space.symbols().size()), kFnvOffset);
}

// ---------------------------------------------------------------------------

VsaAlignResult align_vsa(const KnowledgeGraph& kg_g, const KnowledgeGraph& kg_nn,
                         const VsaAlignConfig& cfg) {
    if (cfg.epochs < 1 || cfg.steps_per_epoch < 1 || cfg.learning_rate <= 0.0) {
        throw InvalidArgument("align_vsa: bad schedule or learning rate");
    }
    if (kg_g.triplet_count() == 0 || kg_nn.triplet_count() == 0) {
        throw InvalidArgument("align_vsa: both graphs need at least one triplet");
    }

    std::mt19937_64 g_rng(derive_seed(cfg.seed, seed_tag::kVsaG));
    std::mt19937_64 nn_rng(derive_seed(cfg.seed, seed_tag::kVsaNn));
    VsaSpace vsa_g = VsaSpace::random_frozen("vsa_g", cfg.dimension, kg_g.entities(),
                                             kg_g.relations(), g_rng);
    VsaSpace vsa_nn = VsaSpace::random_trainable("vsa_nn", cfg.dimension, kg_nn.entities(),
                                                 kg_nn.relations(), vsa_g, nn_rng);

    const int n_g = kg_g.triplet_count();
    std::vector<TripletIdx> g_trips;
    Eigen::MatrixXd g_encodings(cfg.dimension, n_g);
    Eigen::VectorXd g_norms(n_g);
    for (int j = 0; j < n_g; ++j) {
        const TripletIdx ts = to_symbol_triplet(kg_g.triplets()[static_cast<std::size_t>(j)],
                                                kg_g.entity_count());
        g_trips.push_back(ts);
        g_encodings.col(j) = encode_triplet_idx(vsa_g, ts);
        g_norms[j] = g_encodings.col(j).norm();
    }

    // The network-side triplets come through the tensor translation, so this
    // path exercises the same extraction the joint loop uses.
    const KgvTensor kgv = triplets_to_kgv(kg_nn, 1);

    AdamState adam;
    const AdamConfig adam_cfg{cfg.learning_rate, 0.9, 0.999, 1e-8};

    VsaAlignResult result{AlignmentReport{}, {}, {}, std::move(vsa_nn), std::move(vsa_g)};
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto trips = kgv_to_triplets(kgv, 0, 0.5);
        const TripletCosineTables tables(result.vsa_nn, result.vsa_g);
        Eigen::MatrixXd cost(static_cast<Eigen::Index>(trips.size()), n_g);
        std::vector<TripletIdx> nn_idx;
        nn_idx.reserve(trips.size());
        for (std::size_t i = 0; i < trips.size(); ++i) {
            const TripletIdx ti{trips[i].head, kg_nn.entity_count() + trips[i].relation,
                                trips[i].tail};
            nn_idx.push_back(ti);
            const double nn_norm = std::sqrt(tables.nn_norm2(ti));
            for (int j = 0; j < n_g; ++j) {
                cost(static_cast<Eigen::Index>(i), j) =
                    1.0 - tables.dot(ti, g_trips[static_cast<std::size_t>(j)]) /
                              (nn_norm * g_norms[j]);
            }
        }
        const Assignment a = hungarian(cost, HungarianOptions{.lexicographic = false});
        std::vector<MatchedTriplet> matches;
        matches.reserve(a.pairs.size());
        for (const auto& [i, j] : a.pairs) {
            matches.push_back(MatchedTriplet{nn_idx[static_cast<std::size_t>(i)], j});
        }

        double lk_sum = 0.0;
        double lvsa_sum = 0.0;
        for (int s = 0; s < cfg.steps_per_epoch; ++s) {
            Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(cfg.dimension,
                                                         result.vsa_nn.symbol_count());
            const VsaLoss lk = loss_k(result.vsa_nn, matches, g_encodings);
            const VsaLoss r1 = loss_r1(result.vsa_nn);
            const VsaLoss r2 = loss_r2(result.vsa_nn);
            lk_sum += lk.value;
            lvsa_sum += cfg.w_lk * lk.value + cfg.w_lr1 * r1.value + cfg.w_lr2 * r2.value;
            if (cfg.w_lk > 0.0) grad += cfg.w_lk * lk.grad;
            if (cfg.w_lr1 > 0.0) grad += cfg.w_lr1 * r1.grad;
            if (cfg.w_lr2 > 0.0) grad += cfg.w_lr2 * r2.grad;
            if (!std::isfinite(lk.value)) {
                throw TrainingDiverged("align_vsa: non-finite L_K at epoch " +
                                       std::to_string(epoch));
            }
            adam.update(result.vsa_nn.mutable_symbols().data(), grad.data(), grad.size(),
                        adam_cfg);
        }
        result.l_k_per_epoch.push_back(lk_sum / cfg.steps_per_epoch);
        result.l_vsa_per_epoch.push_back(lvsa_sum / cfg.steps_per_epoch);
    }
    result.report = concept_match(result.vsa_nn, result.vsa_g);
    return result;
}

} // namespace kgalign
