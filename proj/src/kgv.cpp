#include "kgalign/kgv.hpp"

#include "kgalign/errors.hpp"

#include <algorithm>

namespace kgalign {

KgvTensor KgvTensor::zeros(int batch, int n_r, int n_e) {
    if (batch < 1 || n_r < 1 || n_e < 1) {
        throw InvalidArgument("KgvTensor::zeros: all dimensions must be >= 1");
    }
    KgvTensor t;
    t.n_r = n_r;
    t.n_e = n_e;
    t.values = Eigen::MatrixXd::Zero(batch, n_r * n_e * n_e);
    return t;
}

long TargetMask::active_count() const {
    long n = 0;
    for (Eigen::Index i = 0; i < active.size(); ++i) {
        n += active.data()[i] ? 1 : 0;
    }
    return n;
}

TargetMask TargetMask::inactive(int batch, int n_r, int n_e) {
    TargetMask m;
    m.n_r = n_r;
    m.n_e = n_e;
    m.targets = Eigen::MatrixXd::Zero(batch, n_r * n_e * n_e);
    m.active.setZero(batch, n_r * n_e * n_e);
    return m;
}

std::vector<Triplet> kgv_to_triplets(const KgvTensor& kgv, int sample, double threshold) {
    if (sample < 0 || sample >= kgv.batch()) {
        throw InvalidArgument("kgv_to_triplets: sample index out of range");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw InvalidArgument("kgv_to_triplets: threshold must lie in (0, 1)");
    }
    std::vector<Triplet> out;
    int cell = 0;
    for (int b = 0; b < kgv.n_r; ++b) {
        for (int c = 0; c < kgv.n_e; ++c) {
            for (int d = 0; d < kgv.n_e; ++d, ++cell) {
                if (kgv.values(sample, cell) >= threshold) {
                    out.push_back(Triplet{c, b, d});
                }
            }
        }
    }
    return out;
}

KgvTensor triplets_to_kgv(const KnowledgeGraph& kg, int batch) {
    if (batch < 1) {
        throw InvalidArgument("triplets_to_kgv: batch must be >= 1");
    }
    KgvTensor t = KgvTensor::zeros(batch, std::max(kg.relation_count(), 1),
                                   std::max(kg.entity_count(), 1));
    for (const auto& tr : kg.triplets()) {
        const int cell = t.cell_index(tr.relation, tr.head, tr.tail);
        t.values.col(cell).setOnes();
    }
    return t;
}

bool SigmaIndex::empty() const {
    auto mapped = [](const std::vector<int>& v) {
        return std::any_of(v.begin(), v.end(), [](int x) { return x >= 0; });
    };
    return !mapped(entity) && !mapped(relation);
}

TargetMask build_conflict_targets(const KnowledgeGraph& kg_g, const SigmaIndex& sigma,
                                  const std::vector<int>& labels,
                                  const std::vector<int>& class_entity,
                                  int n_r, int n_e) {
    const int batch = static_cast<int>(labels.size());
    if (batch < 1) {
        throw InvalidArgument("build_conflict_targets: empty batch");
    }
    if (static_cast<int>(sigma.entity.size()) != n_e ||
        static_cast<int>(sigma.relation.size()) != n_r) {
        throw InvalidArgument("build_conflict_targets: sigma sized for a different KGV");
    }
    TargetMask mask = TargetMask::inactive(batch, n_r, n_e);

    // sigma is injective, so at most one network entity maps to each class
    // entity; find it once per graph entity.
    std::vector<int> head_for_g(static_cast<std::size_t>(kg_g.entity_count()), -1);
    for (int c = 0; c < n_e; ++c) {
        if (sigma.entity[static_cast<std::size_t>(c)] >= 0) {
            head_for_g[static_cast<std::size_t>(sigma.entity[static_cast<std::size_t>(c)])] = c;
        }
    }

    for (int a = 0; a < batch; ++a) {
        const int y = labels[static_cast<std::size_t>(a)];
        if (y < 0 || y >= static_cast<int>(class_entity.size()) ||
            class_entity[static_cast<std::size_t>(y)] < 0) {
            throw InvalidArgument("build_conflict_targets: label " + std::to_string(y) +
                                  " has no class entity");
        }
        const int e_g = class_entity[static_cast<std::size_t>(y)];
        const int c = head_for_g[static_cast<std::size_t>(e_g)];
        if (c < 0) continue; // class entity not in sigma's image: untouched sample
        for (int b = 0; b < n_r; ++b) {
            const int rg = sigma.relation[static_cast<std::size_t>(b)];
            if (rg < 0) continue;
            for (int d = 0; d < n_e; ++d) {
                const int tg = sigma.entity[static_cast<std::size_t>(d)];
                if (tg < 0) continue;
                const int cell = (b * n_e + c) * n_e + d;
                mask.active(a, cell) = 1;
                mask.targets(a, cell) = kg_g.has_triplet(e_g, rg, tg) ? 1.0 : 0.0;
            }
        }
    }
    return mask;
}

} // namespace kgalign
