#include "kgalign/experiments.hpp"

#include "kgalign/errors.hpp"
#include "kgalign/seeds.hpp"
#include "kgalign/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace kgalign {

namespace {

void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << j.dump(2) << "\n";
}

/// Per-class mean KGV over the test set plus its decoding; the data behind
/// the class-level tensor visualizations.
nlohmann::ordered_json kgv_means_json(const TrainState& st, const MnistDataset& test) {
    const int cells = st.cfg.nn_relations * st.cfg.nn_entities * st.cfg.nn_entities;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(st.cfg.classes, cells);
    std::vector<long> counts(static_cast<std::size_t>(st.cfg.classes), 0);

    std::vector<int> order(static_cast<std::size_t>(test.count));
    std::iota(order.begin(), order.end(), 0);
    const int bs = std::max(1, st.cfg.batch_size);
    for (int first = 0; first < test.count; first += bs) {
        const int n = std::min(bs, test.count - first);
        std::vector<int> labels;
        const Eigen::MatrixXd images = test.batch(order, first, n, &labels);
        const ModelOutputs out = st.model.forward(images);
        for (int i = 0; i < n; ++i) {
            sums.row(labels[static_cast<std::size_t>(i)]) += out.kgv.values.row(i);
            ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        }
    }

    auto digits = nlohmann::ordered_json::array();
    for (int y = 0; y < st.cfg.classes; ++y) {
        nlohmann::ordered_json entry;
        entry["label"] = y;
        if (counts[static_cast<std::size_t>(y)] > 0) {
            const Eigen::VectorXd mean =
                sums.row(y).transpose() / static_cast<double>(counts[static_cast<std::size_t>(y)]);
            entry["kgv_mean"] = std::vector<double>(mean.data(), mean.data() + mean.size());
            const Eigen::MatrixXd decoded = st.model.decoder().forward(mean.transpose());
            entry["decoded"] =
                std::vector<double>(decoded.data(), decoded.data() + decoded.size());
        }
        digits.push_back(std::move(entry));
    }
    nlohmann::ordered_json j;
    j["n_r"] = st.cfg.nn_relations;
    j["n_e"] = st.cfg.nn_entities;
    j["digits"] = digits;
    return j;
}

} // namespace

Experiment1Result run_experiment1(const TrainConfig& cfg, const std::filesystem::path& kg_path,
                                  const std::filesystem::path& mnist_dir,
                                  const std::filesystem::path& out_dir) {
    cfg.validate();
    const KnowledgeGraph kg_g = load_kg_json(kg_path);
    const MnistDataset train = load_mnist_idx(mnist_dir / "train-images-idx3-ubyte",
                                              mnist_dir / "train-labels-idx1-ubyte");
    const MnistDataset test = load_mnist_idx(mnist_dir / "t10k-images-idx3-ubyte",
                                             mnist_dir / "t10k-labels-idx1-ubyte");

    std::filesystem::create_directories(out_dir);
    const VsaSpace vsa_g = build_vsa_g(cfg, kg_g);
    write_json(vsa_g.to_json(), out_dir / "vsa_g.json");

    {
        // snapshot of the symbol vectors before any training
        const TrainState initial = init_train_state(cfg, kg_g, vsa_g);
        write_json(initial.vsa_nn.to_json(), out_dir / "vsa_nn_initial.json");
    }

    TrainState st = run_training(cfg, kg_g, vsa_g, train, test, [](const EpochMetrics& m) {
        std::printf("epoch %2d  L_K %.4f  L_R %.4f  L_T %.4f  consistency %.4f  "
                    "similarity %.4f  bipolar %.4f  accuracy %.4f\n",
                    m.epoch, m.l_k, m.l_r, m.l_t, m.consistency, m.similarity, m.bipolar_loss,
                    m.test_accuracy);
        std::fflush(stdout);
    });

    write_metrics_csv(st.history, out_dir / "metrics.csv");
    const AlignmentReport report = concept_match(st.vsa_nn, vsa_g);
    write_json(report.to_json(), out_dir / "alignment.json");
    write_json(st.vsa_nn.to_json(), out_dir / "vsa_nn_final.json");
    write_json(kgv_means_json(st, test), out_dir / "kgv_means.json");
    st.model.save_checkpoint(out_dir / "checkpoint", cfg.epochs, cfg.master_seed);

    return Experiment1Result{st.history, report};
}

SweepAxis sweep_axis_from_name(const std::string& name) {
    if (name == "entity_count") return SweepAxis::EntityCount;
    if (name == "relation_proportion") return SweepAxis::RelationProportion;
    if (name == "triplet_proportion") return SweepAxis::TripletProportion;
    if (name == "distribution_alpha") return SweepAxis::DistributionAlpha;
    if (name == "nn_concept_ratio") return SweepAxis::NnConceptRatio;
    throw InvalidArgument("unknown sweep axis '" + name + "'");
}

std::string sweep_axis_name(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::EntityCount: return "entity_count";
    case SweepAxis::RelationProportion: return "relation_proportion";
    case SweepAxis::TripletProportion: return "triplet_proportion";
    case SweepAxis::DistributionAlpha: return "distribution_alpha";
    case SweepAxis::NnConceptRatio: return "nn_concept_ratio";
    }
    return "entity_count";
}

std::vector<SweepRow> run_experiment2(const SweepSpec& sweep,
                                      const std::filesystem::path& out_dir) {
    if (sweep.values.empty()) throw InvalidArgument("run_experiment2: no sweep values");
    if (sweep.seeds_per_point < 1) throw InvalidArgument("run_experiment2: seeds must be >= 1");

    std::filesystem::create_directories(out_dir);
    std::vector<SweepRow> rows;

    for (std::size_t vi = 0; vi < sweep.values.size(); ++vi) {
        const double value = sweep.values[vi];
        SyntheticKgSpec spec; // defaults for every aspect but the swept one
        switch (sweep.axis) {
        case SweepAxis::EntityCount: spec.entity_count = static_cast<int>(value); break;
        case SweepAxis::RelationProportion: spec.relation_proportion = value; break;
        case SweepAxis::TripletProportion: spec.triplet_proportion = value; break;
        case SweepAxis::DistributionAlpha: spec.alpha = value; break;
        case SweepAxis::NnConceptRatio: spec.nn_concept_ratio = value; break;
        }
        for (int s = 0; s < sweep.seeds_per_point; ++s) {
            const std::uint64_t point_seed =
                derive_seed(sweep.align.seed, 1000003ULL * (vi + 1) + static_cast<std::uint64_t>(s));
            const SyntheticKgPair pair = generate_synthetic_kg(spec, point_seed);
            VsaAlignConfig align = sweep.align;
            align.seed = point_seed;
            const VsaAlignResult res = align_vsa(pair.kg_g, pair.kg_nn, align);

            SweepRow row;
            row.axis = sweep_axis_name(sweep.axis);
            row.value = value;
            row.seed = s;
            row.consistency = res.report.consistency;
            row.similarity = res.report.similarity;
            row.bipolar_loss = res.report.bipolar_loss;
            row.recovered = recovered_fraction(res.report, pair);
            rows.push_back(row);
            std::printf("exp2 %s=%g seed %d: consistency %.4f recovered %.3f\n",
                        row.axis.c_str(), value, s, row.consistency, row.recovered);
            std::fflush(stdout);
        }
    }

    std::ofstream out(out_dir / "sweep.csv", std::ios::binary);
    if (!out) throw Error("run_experiment2: cannot write sweep.csv");
    out << "axis,value,seed,consistency,similarity,bipolar_loss,recovered\n";
    char buf[64];
    auto put = [&](double v, bool last = false) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf << (last ? "\n" : ",");
    };
    for (const auto& r : rows) {
        out << r.axis << ",";
        put(r.value);
        out << r.seed << ",";
        put(r.consistency);
        put(r.similarity);
        put(r.bipolar_loss);
        put(r.recovered, true);
    }
    return rows;
}

std::vector<double> sweep_point_means(const std::vector<SweepRow>& rows,
                                      const std::vector<double>& values) {
    std::vector<double> means;
    for (double v : values) {
        double sum = 0.0;
        int n = 0;
        for (const auto& r : rows) {
            if (r.value == v) {
                sum += r.consistency;
                ++n;
            }
        }
        means.push_back(n > 0 ? sum / n : 0.0);
    }
    return means;
}

} // namespace kgalign
