#pragma once

#include "kgalign/kg.hpp"

#include <Eigen/Core>

#include <vector>

namespace kgalign {

/// The batch x relations x entities x entities activation tensor in [0, 1].
/// A cell (a, b, c, d) at or above the assertion threshold (0.5) encodes
/// triplet (c, b, d) for sample a. Stored row-per-sample, cells flattened
/// in (relation, head, tail) order.
struct KgvTensor {
    Eigen::MatrixXd values; // batch x (n_r * n_e * n_e)
    int n_r = 0;
    int n_e = 0;

    int batch() const { return static_cast<int>(values.rows()); }
    int cells() const { return n_r * n_e * n_e; }

    int cell_index(int relation, int head, int tail) const {
        return (relation * n_e + head) * n_e + tail;
    }

    double at(int sample, int relation, int head, int tail) const {
        return values(sample, cell_index(relation, head, tail));
    }
    double& at(int sample, int relation, int head, int tail) {
        return values(sample, cell_index(relation, head, tail));
    }

    static KgvTensor zeros(int batch, int n_r, int n_e);
};

/// Supervision targets for the conflict-correction loss. A cell is only
/// supervised where `active` is set; `targets` holds 0/1 and is ignored
/// elsewhere. Shapes mirror the KGV tensor.
struct TargetMask {
    Eigen::MatrixXd targets;                 // batch x cells, values in {0, 1}
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> active;
    int n_r = 0;
    int n_e = 0;

    int batch() const { return static_cast<int>(targets.rows()); }
    long active_count() const;

    static TargetMask inactive(int batch, int n_r, int n_e);
};

/// All triplets asserted by one sample, in lexicographic
/// (relation, head, tail) cell order. Threshold comparison is inclusive.
std::vector<Triplet> kgv_to_triplets(const KgvTensor& kgv, int sample,
                                     double threshold = 0.5);

/// Inverse translation: 1.0 at every asserted triplet, 0.0 elsewhere,
/// identical across the batch.
KgvTensor triplets_to_kgv(const KnowledgeGraph& kg, int batch);

/// Concept correspondence in index form: position i holds the matched
/// human-graph index for network concept i, or -1 when unmatched.
struct SigmaIndex {
    std::vector<int> entity;   // size n_e of the network KGV
    std::vector<int> relation; // size n_r

    bool empty() const;
};

/// Builds the conflict-correction targets. For a sample labeled y with
/// class entity e_g: every cell (b, c, d) whose head maps to e_g and whose
/// relation and tail are mapped becomes active, with target 1 when the
/// mapped triplet exists in kg_g and 0 otherwise (closed world per class
/// head). Every other cell stays untouched.
TargetMask build_conflict_targets(const KnowledgeGraph& kg_g, const SigmaIndex& sigma,
                                  const std::vector<int>& labels,
                                  const std::vector<int>& class_entity,
                                  int n_r, int n_e);

} // namespace kgalign
