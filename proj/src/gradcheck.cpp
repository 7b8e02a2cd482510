#include "kgalign/gradcheck.hpp"

#include "kgalign/alignment.hpp"
#include "kgalign/errors.hpp"
#include "kgalign/model.hpp"
#include "kgalign/seeds.hpp"
#include "kgalign/vsa.hpp"

#include <cmath>
#include <random>

namespace kgalign {

GradCheckResult check_gradients(const std::function<double()>& eval,
                                const std::vector<GradProbe>& probes, double epsilon) {
    GradCheckResult res;
    for (const auto& p : probes) {
        const double saved = *p.param;
        *p.param = saved + epsilon;
        const double fp = eval();
        *p.param = saved - epsilon;
        const double fm = eval();
        *p.param = saved;
        const double numeric = (fp - fm) / (2.0 * epsilon);
        if (std::abs(p.analytic) + std::abs(numeric) < 1e-9) {
            ++res.checked;
            continue; // both vanish; agreement
        }
        const double rel = std::abs(p.analytic - numeric) /
                           std::max(std::abs(p.analytic) + std::abs(numeric), 1e-6);
        if (rel > res.max_rel_error) {
            res.max_rel_error = rel;
            res.worst_site = p.site;
        }
        ++res.checked;
    }
    return res;
}

namespace {

std::vector<GradProbe> sample_matrix_probes(Eigen::MatrixXd& params, const Eigen::MatrixXd& grad,
                                            int count, std::mt19937_64& rng,
                                            const std::string& site) {
    std::vector<GradProbe> probes;
    std::uniform_int_distribution<long> pick(0, params.size() - 1);
    for (int i = 0; i < count; ++i) {
        const long k = pick(rng);
        probes.push_back({params.data() + k, grad.data()[k], site + "[" + std::to_string(k) + "]"});
    }
    return probes;
}

} // namespace

double gradcheck_loss_k(std::uint64_t seed) {
    const int dim = 32;
    std::mt19937_64 rng(mix_seed(seed));
    VsaSpace vsa_g = VsaSpace::random_frozen("g", dim, {"x0", "x1", "x2", "x3"}, {"y0", "y1"}, rng);
    VsaSpace vsa_nn = VsaSpace::random_trainable("nn", dim, 5, 2, vsa_g, rng);

    std::vector<TripletIdx> g_trips = {{0, 4, 1}, {1, 4, 2}, {2, 5, 3}, {3, 5, 0}};
    Eigen::MatrixXd g_vectors(dim, static_cast<Eigen::Index>(g_trips.size()));
    for (std::size_t j = 0; j < g_trips.size(); ++j) {
        g_vectors.col(static_cast<Eigen::Index>(j)) = encode_triplet_idx(vsa_g, g_trips[j]);
    }
    // shared symbols across matches exercise gradient accumulation
    const std::vector<MatchedTriplet> matches = {
        {{0, 5, 1}, 0}, {{1, 5, 2}, 1}, {{0, 6, 3}, 2}, {{2, 6, 4}, 3}, {{1, 5, 4}, 0}};

    const VsaLoss loss = loss_k(vsa_nn, matches, g_vectors);
    auto eval = [&] { return loss_k(vsa_nn, matches, g_vectors).value; };
    const auto probes =
        sample_matrix_probes(vsa_nn.mutable_symbols(), loss.grad, 60, rng, "loss_k/symbols");
    return check_gradients(eval, probes).max_rel_error;
}

double gradcheck_loss_r1(std::uint64_t seed) {
    const int dim = 24;
    for (std::uint64_t attempt = 0;; ++attempt) {
        std::mt19937_64 rng(mix_seed(seed + attempt * 7919));
        VsaSpace keywords = VsaSpace::random_frozen("kw", dim, {}, {}, rng);
        VsaSpace space = VsaSpace::random_trainable("nn", dim, 5, 1, keywords, rng);

        // keep all pairs away from the |cos| = 0 kink
        bool ok = true;
        for (int i = 0; i < space.symbol_count() && ok; ++i) {
            for (int j = i + 1; j < space.symbol_count() && ok; ++j) {
                if (std::abs(cosine(space.symbols().col(i), space.symbols().col(j))) < 1e-3) {
                    ok = false;
                }
            }
        }
        if (!ok) continue;

        const VsaLoss loss = loss_r1(space);
        auto eval = [&] { return loss_r1(space).value; };
        const auto probes =
            sample_matrix_probes(space.mutable_symbols(), loss.grad, 60, rng, "loss_r1/symbols");
        return check_gradients(eval, probes).max_rel_error;
    }
}

double gradcheck_loss_r2(std::uint64_t seed) {
    const int dim = 16;
    std::mt19937_64 rng(mix_seed(seed));
    VsaSpace keywords = VsaSpace::random_frozen("kw", dim, {}, {}, rng);
    VsaSpace space = VsaSpace::random_trainable("nn", dim, 4, 1, keywords, rng);
    // keep components off the min() switch at 0
    Eigen::MatrixXd& s = space.mutable_symbols();
    for (long k = 0; k < s.size(); ++k) {
        if (std::abs(s.data()[k]) < 1e-2) s.data()[k] += s.data()[k] >= 0 ? 0.05 : -0.05;
    }

    const VsaLoss loss = loss_r2(space);
    auto eval = [&] { return loss_r2(space).value; };
    const auto probes = sample_matrix_probes(s, loss.grad, 60, rng, "loss_r2/symbols");
    return check_gradients(eval, probes).max_rel_error;
}

double gradcheck_regression(std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed));
    const int batch = 3, n_r = 1, n_e = 4;
    KgvTensor kgv = KgvTensor::zeros(batch, n_r, n_e);
    std::uniform_real_distribution<double> uni(0.1, 0.9);
    for (long k = 0; k < kgv.values.size(); ++k) kgv.values.data()[k] = uni(rng);

    TargetMask mask = TargetMask::inactive(batch, n_r, n_e);
    std::uniform_int_distribution<int> coin(0, 2);
    for (long k = 0; k < mask.targets.size(); ++k) {
        if (coin(rng) == 0) {
            mask.active.data()[k] = 1;
            mask.targets.data()[k] = coin(rng) == 0 ? 1.0 : 0.0;
        }
    }

    const RegressionLoss loss = regression_loss(kgv, mask);
    auto eval = [&] { return regression_loss(kgv, mask).value; };
    const auto probes = sample_matrix_probes(kgv.values, loss.d_kgv, 48, rng, "regression/kgv");
    return check_gradients(eval, probes).max_rel_error;
}

double gradcheck_task(std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed));
    const int batch = 3, npix = 12, classes = 5;
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    std::uniform_real_distribution<double> logit(-2.0, 2.0);
    std::uniform_int_distribution<int> lab(0, classes - 1);

    Eigen::MatrixXd images(batch, npix);
    ModelOutputs out;
    out.reconstruction.resize(batch, npix);
    out.class_logits.resize(batch, classes);
    for (long k = 0; k < images.size(); ++k) {
        images.data()[k] = unit(rng);
        out.reconstruction.data()[k] = unit(rng);
    }
    for (long k = 0; k < out.class_logits.size(); ++k) out.class_logits.data()[k] = logit(rng);
    std::vector<int> labels(batch);
    for (auto& y : labels) y = lab(rng);

    const TaskLoss loss = task_loss(out, images, labels);
    auto eval = [&] { return task_loss(out, images, labels).value; };
    auto probes =
        sample_matrix_probes(out.reconstruction, loss.d_reconstruction, 30, rng, "task/recon");
    const auto logit_probes =
        sample_matrix_probes(out.class_logits, loss.d_logits, 30, rng, "task/logits");
    probes.insert(probes.end(), logit_probes.begin(), logit_probes.end());
    return check_gradients(eval, probes).max_rel_error;
}

double gradcheck_full_network(std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed));
    const int input = 784, hidden = 16, n_r = 1, n_e = 6, classes = 10, batch = 4;
    KgvAutoencoder model = KgvAutoencoder::make(input, hidden, n_r, n_e, classes, rng);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd images(batch, input);
    for (long k = 0; k < images.size(); ++k) images.data()[k] = unit(rng);
    std::uniform_int_distribution<int> lab(0, classes - 1);
    std::vector<int> labels(batch);
    for (auto& y : labels) y = lab(rng);

    TargetMask mask = TargetMask::inactive(batch, n_r, n_e);
    std::uniform_int_distribution<int> coin(0, 3);
    for (long k = 0; k < mask.targets.size(); ++k) {
        if (coin(rng) == 0) {
            mask.active.data()[k] = 1;
            mask.targets.data()[k] = coin(rng) == 0 ? 1.0 : 0.0;
        }
    }

    auto eval = [&] {
        const ModelOutputs out = model.forward(images);
        return task_loss(out, images, labels).value + regression_loss(out.kgv, mask).value;
    };

    ModelTrace trace;
    const ModelOutputs out = model.forward(images, &trace);
    const TaskLoss lt = task_loss(out, images, labels);
    const RegressionLoss lr = regression_loss(out.kgv, mask);
    const ModelGrads grads =
        model.backward(trace, lt.d_reconstruction_preact, lt.d_logits, &lr.d_kgv_preact);

    std::vector<GradProbe> probes;
    auto add = [&](Mlp& net, const std::vector<LayerGrads>& g, const std::string& name) {
        for (std::size_t l = 0; l < net.layers().size(); ++l) {
            auto w = sample_matrix_probes(net.layers()[l].weights, g[l].d_weights, 20, rng,
                                          name + ".W" + std::to_string(l));
            probes.insert(probes.end(), w.begin(), w.end());
            Eigen::VectorXd& b = net.layers()[l].biases;
            std::uniform_int_distribution<long> pick(0, b.size() - 1);
            for (int i = 0; i < 6; ++i) {
                const long k = pick(rng);
                probes.push_back({b.data() + k, g[l].d_biases[k],
                                  name + ".b" + std::to_string(l) + "[" + std::to_string(k) + "]"});
            }
        }
    };
    add(model.encoder(), grads.encoder, "encoder");
    add(model.decoder(), grads.decoder, "decoder");
    add(model.classifier(), grads.classifier, "classifier");
    return check_gradients(eval, probes, 1e-4).max_rel_error;
}

} // namespace kgalign
