#pragma once

#include "kgalign/hungarian.hpp"
#include "kgalign/kg.hpp"
#include "kgalign/kgv.hpp"
#include "kgalign/vsa.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace kgalign {

/// A triplet referenced by symbol index into one space.
struct TripletIdx {
    int head = 0;
    int rel = 0;
    int tail = 0;
};

/// Encodes a triplet from symbol indices (fast path; no name lookups).
HyperVector encode_triplet_idx(const VsaSpace& space, const TripletIdx& t);

/// cost[i][j] = 1 - cos(nn[i], g[j]), in [0, 2].
Eigen::MatrixXd triplet_cost_matrix(const std::vector<TripletVector>& nn_vectors,
                                    const std::vector<TripletVector>& g_vectors);

/// Value and symbol-vector gradient of one VSA loss. `value` carries the
/// size-independent normalization used for optimization; `literal` carries
/// the n_NN-normalized variant for reporting. Both are logged.
struct VsaLoss {
    double value = 0.0;
    double literal = 0.0;
    Eigen::MatrixXd grad; // D x symbol_count, for `value`
    bool empty_assignment = false;
};

/// One matched pair: a network triplet (by symbol indices) against a
/// column of the precomputed human-side encoding matrix.
struct MatchedTriplet {
    TripletIdx nn;
    int g = 0;
};

/// L_K = (1/M) sum over matches of (1 - cos(K_NN, K_G)). The gradient
/// flows only into the network space's symbol vectors, through each
/// encoding's three bind terms; a symbol in several matched triplets
/// accumulates. An empty match list yields zero loss with a warning flag.
VsaLoss loss_k(const VsaSpace& nn_space, const std::vector<MatchedTriplet>& matches,
               const Eigen::MatrixXd& g_vectors);

/// Convenience overload over materialized triplet vectors and an
/// assignment from `hungarian`, as used in tests and small callers.
VsaLoss loss_k(const VsaSpace& nn_space, const std::vector<TripletVector>& nn_vectors,
               const std::vector<TripletVector>& g_vectors, const Assignment& assignment);

/// Independence regulator: pairwise |cos| over distinct symbols.
/// literal = sum / n_NN (as reported); value = sum / pair count.
/// The subgradient of |x| at 0 is taken as 0.
VsaLoss loss_r1(const VsaSpace& space);

/// Bipolarity regulator: per component min((x-1)^2, (x+1)^2).
/// literal = sum / n_NN; value = sum / (n_NN * D). The gradient at a
/// component exactly 0 pushes toward +1.
VsaLoss loss_r2(const VsaSpace& space);

/// The concept correspondence produced by bipartite matching of symbol
/// vectors, entities and relations in separate pools, no thresholds.
struct AlignmentReport {
    struct Entry {
        std::string nn_symbol;
        std::string g_symbol;
        double cosine = 0.0;
        SymbolKind kind = SymbolKind::Entity;
    };
    std::vector<Entry> sigma; // in network-space symbol order

    double consistency = 0.0;           // mean cosine over all matched pairs
    double consistency_entities = 0.0;  // entity pool only
    double consistency_relations = 0.0; // relation pool only
    double similarity = 0.0;            // mean pairwise |cos| of network symbols
    double bipolar_loss = 0.0;          // mean per-component bipolarity defect
    double similarity_literal = 0.0;    // n_NN-normalized variants, as reported
    double bipolar_literal = 0.0;

    nlohmann::ordered_json to_json() const;
};

/// Matches every concept of the smaller pool; both spaces must share
/// dimension. Throws DimensionMismatch otherwise.
AlignmentReport concept_match(const VsaSpace& vsa_nn, const VsaSpace& vsa_g);

/// Translates a report into KGV index form against the human graph.
/// Network entity symbols map to KGV entity indices by kind order.
SigmaIndex to_sigma_index(const AlignmentReport& report, const VsaSpace& vsa_nn,
                          const KnowledgeGraph& kg_g);

/// Gram-style tables for cosines between triplet encodings of two spaces
/// that share keywords, without materializing per-triplet vectors. Rebuild
/// whenever the trainable symbols move.
class TripletCosineTables {
public:
    TripletCosineTables(const VsaSpace& nn, const VsaSpace& g);

    double dot(const TripletIdx& a, const TripletIdx& b) const;
    double nn_norm2(const TripletIdx& a) const;
    double g_norm2(const TripletIdx& b) const;
    double cosine(const TripletIdx& a, const TripletIdx& b) const;

private:
    Eigen::MatrixXd plain_, hr_, ht_, rt_;          // nn x g cross terms
    Eigen::MatrixXd nn_hr_, nn_ht_, nn_rt_;         // nn x nn self terms
    Eigen::MatrixXd g_hr_, g_ht_, g_rt_;            // g x g self terms
    Eigen::VectorXd nn_sq_, g_sq_;                  // squared symbol norms
};

} // namespace kgalign
