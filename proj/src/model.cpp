#include "kgalign/model.hpp"

#include "kgalign/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>

namespace kgalign {

KgvAutoencoder KgvAutoencoder::make(int input_dim, int hidden_dim, int n_r, int n_e,
                                    int classes, std::mt19937_64& rng) {
    if (input_dim < 1 || hidden_dim < 1 || n_r < 1 || n_e < 1 || classes < 1) {
        throw InvalidArgument("KgvAutoencoder::make: all dimensions must be >= 1");
    }
    const int kgv_dim = n_r * n_e * n_e;
    KgvAutoencoder m;
    m.n_r_ = n_r;
    m.n_e_ = n_e;
    m.encoder_ = Mlp::glorot({input_dim, hidden_dim, kgv_dim},
                             {Activation::Relu, Activation::Sigmoid}, rng);
    m.decoder_ = Mlp::glorot({kgv_dim, hidden_dim, input_dim},
                             {Activation::Relu, Activation::Sigmoid}, rng);
    m.classifier_ = Mlp::glorot({kgv_dim, classes}, {Activation::Identity}, rng);
    return m;
}

ModelOutputs KgvAutoencoder::forward(const Eigen::MatrixXd& images, ModelTrace* trace) const {
    if (images.cols() != encoder_.input_dim()) {
        throw InvalidArgument("KgvAutoencoder::forward: input has " +
                              std::to_string(images.cols()) + " features, expected " +
                              std::to_string(encoder_.input_dim()));
    }
    if (images.minCoeff() < 0.0 || images.maxCoeff() > 1.0) {
        throw InvalidArgument("KgvAutoencoder::forward: pixel values must lie in [0, 1]");
    }
    ModelOutputs out;
    out.kgv.n_r = n_r_;
    out.kgv.n_e = n_e_;
    out.kgv.values = encoder_.forward(images, trace ? &trace->encoder : nullptr);
    out.reconstruction = decoder_.forward(out.kgv.values, trace ? &trace->decoder : nullptr);
    out.class_logits = classifier_.forward(out.kgv.values, trace ? &trace->classifier : nullptr);
    return out;
}

ModelGrads KgvAutoencoder::backward(const ModelTrace& trace,
                                    const Eigen::MatrixXd& d_recon_preact,
                                    const Eigen::MatrixXd& d_logits,
                                    const Eigen::MatrixXd* d_kgv_preact_extra) const {
    ModelGrads grads;
    auto [dec_grads, d_kgv_dec] = decoder_.backward(trace.decoder, d_recon_preact,
                                                    /*upstream_is_preact=*/true);
    auto [clf_grads, d_kgv_clf] = classifier_.backward(trace.classifier, d_logits,
                                                       /*upstream_is_preact=*/true);
    grads.decoder = std::move(dec_grads);
    grads.classifier = std::move(clf_grads);
    grads.d_kgv = d_kgv_dec + d_kgv_clf;

    // chain through the encoder's sigmoid once, then add any pre-activation
    // contribution (the fused regression gradient)
    const Eigen::MatrixXd& kgv = trace.encoder.post.back();
    Eigen::MatrixXd d_enc_preact =
        grads.d_kgv.cwiseProduct(kgv.cwiseProduct((1.0 - kgv.array()).matrix()));
    if (d_kgv_preact_extra) {
        if (d_kgv_preact_extra->rows() != d_enc_preact.rows() ||
            d_kgv_preact_extra->cols() != d_enc_preact.cols()) {
            throw InvalidArgument("KgvAutoencoder::backward: extra KGV gradient shape mismatch");
        }
        d_enc_preact += *d_kgv_preact_extra;
    }
    auto [enc_grads, d_input] = encoder_.backward(trace.encoder, d_enc_preact,
                                                  /*upstream_is_preact=*/true);
    (void)d_input;
    grads.encoder = std::move(enc_grads);
    return grads;
}

bool KgvAutoencoder::parameters_finite() const {
    return encoder_.parameters_finite() && decoder_.parameters_finite() &&
           classifier_.parameters_finite();
}

namespace {

double bce_term(double p, double target) {
    // p comes from a sigmoid, so log arguments stay positive
    constexpr double kTiny = 1e-300;
    return -(target * std::log(std::max(p, kTiny)) +
             (1.0 - target) * std::log(std::max(1.0 - p, kTiny)));
}

double clamped_unit(double p) {
    constexpr double kEps = 1e-15;
    return std::min(std::max(p, kEps), 1.0 - kEps);
}

} // namespace

TaskLoss task_loss(const ModelOutputs& outputs, const Eigen::MatrixXd& images,
                   const std::vector<int>& labels) {
    const Eigen::Index batch = images.rows();
    const Eigen::Index npix = images.cols();
    if (outputs.reconstruction.rows() != batch || outputs.reconstruction.cols() != npix) {
        throw InvalidArgument("task_loss: reconstruction shape mismatch");
    }
    if (static_cast<Eigen::Index>(labels.size()) != batch) {
        throw InvalidArgument("task_loss: label count mismatch");
    }
    const int classes = static_cast<int>(outputs.class_logits.cols());

    TaskLoss out;
    out.d_reconstruction.resize(batch, npix);
    out.d_reconstruction_preact.resize(batch, npix);
    out.d_logits.resize(batch, classes);

    const double inv_bn = 1.0 / (static_cast<double>(batch) * npix);
    double bce = 0.0;
    for (Eigen::Index a = 0; a < batch; ++a) {
        for (Eigen::Index k = 0; k < npix; ++k) {
            const double r = outputs.reconstruction(a, k);
            const double x = images(a, k);
            bce += bce_term(r, x);
            out.d_reconstruction_preact(a, k) = (r - x) * inv_bn;
            const double rc = clamped_unit(r);
            out.d_reconstruction(a, k) = (rc - x) / (rc * (1.0 - rc)) * inv_bn;
        }
    }
    out.reconstruction_bce = bce * inv_bn;

    double ce = 0.0;
    const double inv_b = 1.0 / static_cast<double>(batch);
    for (Eigen::Index a = 0; a < batch; ++a) {
        const int y = labels[static_cast<std::size_t>(a)];
        if (y < 0 || y >= classes) {
            throw InvalidArgument("task_loss: label " + std::to_string(y) + " out of range");
        }
        const auto row = outputs.class_logits.row(a);
        const double zmax = row.maxCoeff();
        double sum = 0.0;
        for (int c = 0; c < classes; ++c) sum += std::exp(row(c) - zmax);
        const double logz = zmax + std::log(sum);
        ce += logz - row(y);
        for (int c = 0; c < classes; ++c) {
            const double softmax = std::exp(row(c) - logz);
            out.d_logits(a, c) = (softmax - (c == y ? 1.0 : 0.0)) * inv_b;
        }
    }
    out.classification_ce = ce * inv_b;
    out.value = out.reconstruction_bce + out.classification_ce;
    return out;
}

RegressionLoss regression_loss(const KgvTensor& kgv, const TargetMask& mask) {
    if (mask.targets.rows() != kgv.values.rows() || mask.targets.cols() != kgv.values.cols()) {
        throw InvalidArgument("regression_loss: mask shape does not match KGV");
    }
    RegressionLoss out;
    out.d_kgv = Eigen::MatrixXd::Zero(kgv.values.rows(), kgv.values.cols());
    out.d_kgv_preact = Eigen::MatrixXd::Zero(kgv.values.rows(), kgv.values.cols());
    out.active_cells = mask.active_count();
    if (out.active_cells == 0) return out;

    const double inv_n = 1.0 / static_cast<double>(out.active_cells);
    double sum = 0.0;
    for (Eigen::Index a = 0; a < kgv.values.rows(); ++a) {
        for (Eigen::Index k = 0; k < kgv.values.cols(); ++k) {
            if (!mask.active(a, k)) continue;
            const double v = kgv.values(a, k);
            const double t = mask.targets(a, k);
            sum += bce_term(v, t);
            out.d_kgv_preact(a, k) = (v - t) * inv_n;
            const double vc = clamped_unit(v);
            out.d_kgv(a, k) = (vc - t) / (vc * (1.0 - vc)) * inv_n;
        }
    }
    out.value = sum * inv_n;
    return out;
}

// ---------------------------------------------------------------------------
// checkpoint io

namespace {

struct Section {
    std::string name;
    const Eigen::MatrixXd* mat = nullptr;
    const Eigen::VectorXd* vec = nullptr;
};

void collect_sections(const Mlp& net, const std::string& prefix, std::vector<Section>& out) {
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        out.push_back({prefix + "." + std::to_string(l) + ".W", &net.layers()[l].weights, nullptr});
        out.push_back({prefix + "." + std::to_string(l) + ".b", nullptr, &net.layers()[l].biases});
    }
}

void write_le_doubles(std::ofstream& out, const double* data, std::size_t count) {
    // x86-64 is little endian; write directly
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(count * sizeof(double)));
}

std::string activation_name(Activation a) {
    switch (a) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Relu: return "relu";
    case Activation::Identity: return "identity";
    }
    return "identity";
}

Activation activation_from_name(const std::string& s) {
    if (s == "sigmoid") return Activation::Sigmoid;
    if (s == "relu") return Activation::Relu;
    if (s == "identity") return Activation::Identity;
    throw KgParseError("checkpoint: unknown activation '" + s + "'");
}

nlohmann::ordered_json net_arch(const Mlp& net) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& l : net.layers()) {
        arr.push_back({{"out", l.weights.rows()},
                       {"in", l.weights.cols()},
                       {"activation", activation_name(l.activation)}});
    }
    return arr;
}

Mlp net_from_arch(const nlohmann::ordered_json& arch) {
    std::vector<Layer> layers;
    for (const auto& l : arch) {
        Layer layer;
        layer.weights = Eigen::MatrixXd::Zero(l.at("out").get<int>(), l.at("in").get<int>());
        layer.biases = Eigen::VectorXd::Zero(l.at("out").get<int>());
        layer.activation = activation_from_name(l.at("activation").get<std::string>());
        layers.push_back(std::move(layer));
    }
    return Mlp(std::move(layers));
}

} // namespace

void KgvAutoencoder::save_checkpoint(const std::filesystem::path& prefix, int epoch,
                                     unsigned long long master_seed) const {
    std::vector<Section> sections;
    collect_sections(encoder_, "encoder", sections);
    collect_sections(decoder_, "decoder", sections);
    collect_sections(classifier_, "classifier", sections);

    nlohmann::ordered_json manifest;
    manifest["format"] = "kgalign-checkpoint-v1";
    manifest["dtype"] = "float64";
    manifest["byte_order"] = "little";
    manifest["epoch"] = epoch;
    manifest["master_seed"] = master_seed;
    manifest["n_r"] = n_r_;
    manifest["n_e"] = n_e_;
    manifest["encoder"] = net_arch(encoder_);
    manifest["decoder"] = net_arch(decoder_);
    manifest["classifier"] = net_arch(classifier_);

    std::size_t offset = 0;
    auto secs = nlohmann::ordered_json::array();
    for (const auto& s : sections) {
        const std::size_t count =
            s.mat ? static_cast<std::size_t>(s.mat->size()) : static_cast<std::size_t>(s.vec->size());
        secs.push_back({{"name", s.name}, {"offset", offset}, {"count", count}});
        offset += count;
    }
    manifest["sections"] = secs;

    std::ofstream mj(prefix.string() + ".json");
    if (!mj) throw Error("save_checkpoint: cannot write manifest");
    mj << manifest.dump(2) << "\n";

    std::ofstream blob(prefix.string() + ".bin", std::ios::binary);
    if (!blob) throw Error("save_checkpoint: cannot write blob");
    for (const auto& s : sections) {
        if (s.mat) {
            write_le_doubles(blob, s.mat->data(), static_cast<std::size_t>(s.mat->size()));
        } else {
            write_le_doubles(blob, s.vec->data(), static_cast<std::size_t>(s.vec->size()));
        }
    }
}

KgvAutoencoder KgvAutoencoder::load_checkpoint(const std::filesystem::path& prefix) {
    std::ifstream mj(prefix.string() + ".json");
    if (!mj) throw Error("load_checkpoint: cannot open manifest");
    nlohmann::ordered_json manifest;
    try {
        mj >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw KgParseError(std::string("load_checkpoint: bad manifest: ") + e.what());
    }
    if (manifest.at("format").get<std::string>() != "kgalign-checkpoint-v1") {
        throw KgParseError("load_checkpoint: unknown checkpoint format");
    }

    KgvAutoencoder m;
    m.n_r_ = manifest.at("n_r").get<int>();
    m.n_e_ = manifest.at("n_e").get<int>();
    m.encoder_ = net_from_arch(manifest.at("encoder"));
    m.decoder_ = net_from_arch(manifest.at("decoder"));
    m.classifier_ = net_from_arch(manifest.at("classifier"));

    std::ifstream blob(prefix.string() + ".bin", std::ios::binary);
    if (!blob) throw Error("load_checkpoint: cannot open blob");

    auto read_into = [&blob](double* dst, std::size_t count) {
        blob.read(reinterpret_cast<char*>(dst),
                  static_cast<std::streamsize>(count * sizeof(double)));
        if (!blob) throw Error("load_checkpoint: blob truncated");
    };
    for (Mlp* net : {&m.encoder_, &m.decoder_, &m.classifier_}) {
        for (auto& l : net->layers()) {
            read_into(l.weights.data(), static_cast<std::size_t>(l.weights.size()));
            read_into(l.biases.data(), static_cast<std::size_t>(l.biases.size()));
        }
    }
    return m;
}

} // namespace kgalign
