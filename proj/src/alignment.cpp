#include "kgalign/alignment.hpp"

#include "kgalign/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace kgalign {

HyperVector encode_triplet_idx(const VsaSpace& space, const TripletIdx& t) {
    const HyperVector& h = space.keyword(VsaSpace::kHeadKeyword);
    const HyperVector& r = space.keyword(VsaSpace::kRelationKeyword);
    const HyperVector& tw = space.keyword(VsaSpace::kTailKeyword);
    return h.cwiseProduct(space.symbols().col(t.head)) +
           r.cwiseProduct(space.symbols().col(t.rel)) +
           tw.cwiseProduct(space.symbols().col(t.tail));
}

Eigen::MatrixXd triplet_cost_matrix(const std::vector<TripletVector>& nn_vectors,
                                    const std::vector<TripletVector>& g_vectors) {
    if (nn_vectors.empty() || g_vectors.empty()) {
        throw InvalidArgument("triplet_cost_matrix: both vector lists must be non-empty");
    }
    Eigen::MatrixXd cost(static_cast<Eigen::Index>(nn_vectors.size()),
                         static_cast<Eigen::Index>(g_vectors.size()));
    for (std::size_t i = 0; i < nn_vectors.size(); ++i) {
        for (std::size_t j = 0; j < g_vectors.size(); ++j) {
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                1.0 - cosine(nn_vectors[i].vector, g_vectors[j].vector);
        }
    }
    return cost;
}

VsaLoss loss_k(const VsaSpace& nn_space, const std::vector<MatchedTriplet>& matches,
               const Eigen::MatrixXd& g_vectors) {
    VsaLoss out;
    out.grad = Eigen::MatrixXd::Zero(nn_space.dimension(), nn_space.symbol_count());
    if (matches.empty()) {
        out.empty_assignment = true;
        out.literal = 0.0;
        return out;
    }
    const HyperVector& kw_h = nn_space.keyword(VsaSpace::kHeadKeyword);
    const HyperVector& kw_r = nn_space.keyword(VsaSpace::kRelationKeyword);
    const HyperVector& kw_t = nn_space.keyword(VsaSpace::kTailKeyword);
    const double inv_m = 1.0 / static_cast<double>(matches.size());

    HyperVector u(nn_space.dimension());
    HyperVector gu(nn_space.dimension());
    for (const auto& m : matches) {
        u = kw_h.cwiseProduct(nn_space.symbols().col(m.nn.head)) +
            kw_r.cwiseProduct(nn_space.symbols().col(m.nn.rel)) +
            kw_t.cwiseProduct(nn_space.symbols().col(m.nn.tail));
        const auto v = g_vectors.col(m.g);
        const double nu = u.norm();
        const double nv = v.norm();
        if (nu == 0.0 || nv == 0.0) {
            throw UndefinedSimilarity("loss_k: zero triplet encoding");
        }
        const double c = u.dot(v) / (nu * nv);
        out.value += (1.0 - c) * inv_m;
        // d(1 - cos(u, v))/du = -(v/(|u||v|) - cos * u/|u|^2)
        gu = -inv_m * (v / (nu * nv) - (c / (nu * nu)) * u);
        out.grad.col(m.nn.head) += gu.cwiseProduct(kw_h);
        out.grad.col(m.nn.rel) += gu.cwiseProduct(kw_r);
        out.grad.col(m.nn.tail) += gu.cwiseProduct(kw_t);
    }
    out.literal = out.value;
    return out;
}

VsaLoss loss_k(const VsaSpace& nn_space, const std::vector<TripletVector>& nn_vectors,
               const std::vector<TripletVector>& g_vectors, const Assignment& assignment) {
    Eigen::MatrixXd g_mat(nn_space.dimension(), static_cast<Eigen::Index>(g_vectors.size()));
    for (std::size_t j = 0; j < g_vectors.size(); ++j) {
        if (g_vectors[j].vector.size() != nn_space.dimension()) {
            throw DimensionMismatch("loss_k: human-side vector dimension mismatch");
        }
        g_mat.col(static_cast<Eigen::Index>(j)) = g_vectors[j].vector;
    }
    std::vector<MatchedTriplet> matches;
    for (const auto& [i, j] : assignment.pairs) {
        if (i < 0 || i >= static_cast<int>(nn_vectors.size()) || j < 0 ||
            j >= static_cast<int>(g_vectors.size())) {
            throw InvalidArgument("loss_k: assignment pair out of range");
        }
        const auto& tv = nn_vectors[static_cast<std::size_t>(i)];
        matches.push_back(MatchedTriplet{TripletIdx{nn_space.index_of(tv.head),
                                                    nn_space.index_of(tv.relation),
                                                    nn_space.index_of(tv.tail)},
                                         j});
    }
    return loss_k(nn_space, matches, g_mat);
}

VsaLoss loss_r1(const VsaSpace& space) {
    const int n = space.symbol_count();
    VsaLoss out;
    out.grad = Eigen::MatrixXd::Zero(space.dimension(), n);
    if (n < 2) return out;

    const Eigen::MatrixXd& s = space.symbols();
    Eigen::VectorXd norms(n);
    for (int i = 0; i < n; ++i) norms[i] = s.col(i).norm();

    const long pair_count = static_cast<long>(n) * (n - 1) / 2;
    double sum_abs = 0.0;
    const double inv_pairs = 1.0 / static_cast<double>(pair_count);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (norms[i] == 0.0 || norms[j] == 0.0) continue;
            const double c = s.col(i).dot(s.col(j)) / (norms[i] * norms[j]);
            sum_abs += std::abs(c);
            const double sign = c > 0.0 ? 1.0 : (c < 0.0 ? -1.0 : 0.0);
            if (sign == 0.0) continue; // subgradient of |x| at 0
            const double w = sign * inv_pairs;
            out.grad.col(i) +=
                w * (s.col(j) / (norms[i] * norms[j]) - (c / (norms[i] * norms[i])) * s.col(i));
            out.grad.col(j) +=
                w * (s.col(i) / (norms[i] * norms[j]) - (c / (norms[j] * norms[j])) * s.col(j));
        }
    }
    out.value = sum_abs * inv_pairs;
    out.literal = sum_abs / static_cast<double>(n);
    return out;
}

VsaLoss loss_r2(const VsaSpace& space) {
    const int n = space.symbol_count();
    const int d = space.dimension();
    VsaLoss out;
    out.grad = Eigen::MatrixXd::Zero(d, n);
    if (n == 0) return out;

    const Eigen::MatrixXd& s = space.symbols();
    const double inv_nd = 1.0 / (static_cast<double>(n) * d);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) {
            const double x = s(k, i);
            const double dm = x - 1.0;
            const double dp = x + 1.0;
            // tie at x == 0 resolves toward +1
            if (x > 0.0 || x == 0.0) {
                sum += dm * dm;
                out.grad(k, i) = 2.0 * dm * inv_nd;
            } else {
                sum += dp * dp;
                out.grad(k, i) = 2.0 * dp * inv_nd;
            }
        }
    }
    out.value = sum * inv_nd;
    out.literal = sum / static_cast<double>(n);
    return out;
}

namespace {

void match_pool(const VsaSpace& vsa_nn, const VsaSpace& vsa_g, SymbolKind kind,
                AlignmentReport& report, double& cos_sum, int& pool_pairs) {
    const auto nn_idx = vsa_nn.indices_of_kind(kind);
    const auto g_idx = vsa_g.indices_of_kind(kind);
    pool_pairs = 0;
    cos_sum = 0.0;
    if (nn_idx.empty() || g_idx.empty()) return;

    Eigen::MatrixXd cost(static_cast<Eigen::Index>(nn_idx.size()),
                         static_cast<Eigen::Index>(g_idx.size()));
    for (std::size_t i = 0; i < nn_idx.size(); ++i) {
        for (std::size_t j = 0; j < g_idx.size(); ++j) {
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                1.0 - cosine(vsa_nn.symbols().col(nn_idx[i]), vsa_g.symbols().col(g_idx[j]));
        }
    }
    const Assignment a = hungarian(cost);
    for (const auto& [i, j] : a.pairs) {
        AlignmentReport::Entry e;
        e.nn_symbol = vsa_nn.symbol_name(nn_idx[static_cast<std::size_t>(i)]);
        e.g_symbol = vsa_g.symbol_name(g_idx[static_cast<std::size_t>(j)]);
        e.cosine = 1.0 - cost(i, j);
        e.kind = kind;
        report.sigma.push_back(e);
        cos_sum += e.cosine;
        ++pool_pairs;
    }
}

} // namespace

AlignmentReport concept_match(const VsaSpace& vsa_nn, const VsaSpace& vsa_g) {
    if (vsa_nn.dimension() != vsa_g.dimension()) {
        throw DimensionMismatch("concept_match: spaces have different dimensions");
    }
    AlignmentReport report;
    double cos_e = 0.0, cos_r = 0.0;
    int n_e = 0, n_r = 0;
    match_pool(vsa_nn, vsa_g, SymbolKind::Entity, report, cos_e, n_e);
    match_pool(vsa_nn, vsa_g, SymbolKind::Relation, report, cos_r, n_r);

    report.consistency_entities = n_e > 0 ? cos_e / n_e : 0.0;
    report.consistency_relations = n_r > 0 ? cos_r / n_r : 0.0;
    report.consistency = (n_e + n_r) > 0 ? (cos_e + cos_r) / (n_e + n_r) : 0.0;

    const VsaLoss r1 = loss_r1(vsa_nn);
    const VsaLoss r2 = loss_r2(vsa_nn);
    report.similarity = r1.value;
    report.similarity_literal = r1.literal;
    report.bipolar_loss = r2.value;
    report.bipolar_literal = r2.literal;
    return report;
}

nlohmann::ordered_json AlignmentReport::to_json() const {
    nlohmann::ordered_json sig;
    for (const auto& e : sigma) {
        sig[e.nn_symbol] = {{"match", e.g_symbol}, {"cosine", e.cosine}};
    }
    nlohmann::ordered_json j;
    j["sigma"] = sig;
    j["consistency"] = consistency;
    j["similarity"] = similarity;
    j["bipolar_loss"] = bipolar_loss;
    j["consistency_entities"] = consistency_entities;
    j["consistency_relations"] = consistency_relations;
    j["similarity_literal"] = similarity_literal;
    j["bipolar_literal"] = bipolar_literal;
    return j;
}

SigmaIndex to_sigma_index(const AlignmentReport& report, const VsaSpace& vsa_nn,
                          const KnowledgeGraph& kg_g) {
    const auto nn_entities = vsa_nn.indices_of_kind(SymbolKind::Entity);
    const auto nn_relations = vsa_nn.indices_of_kind(SymbolKind::Relation);

    SigmaIndex sigma;
    sigma.entity.assign(nn_entities.size(), -1);
    sigma.relation.assign(nn_relations.size(), -1);

    auto position_within_kind = [](const std::vector<int>& kind_indices, int symbol_index) {
        for (std::size_t p = 0; p < kind_indices.size(); ++p) {
            if (kind_indices[p] == symbol_index) return static_cast<int>(p);
        }
        return -1;
    };

    for (const auto& e : report.sigma) {
        const int sym = vsa_nn.index_of(e.nn_symbol);
        if (e.kind == SymbolKind::Entity) {
            const int pos = position_within_kind(nn_entities, sym);
            if (pos >= 0) sigma.entity[static_cast<std::size_t>(pos)] = kg_g.entity_index(e.g_symbol);
        } else {
            const int pos = position_within_kind(nn_relations, sym);
            if (pos >= 0) sigma.relation[static_cast<std::size_t>(pos)] = kg_g.relation_index(e.g_symbol);
        }
    }
    return sigma;
}

namespace {

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& a, const Eigen::VectorXd& w,
                              const Eigen::MatrixXd& b) {
    return a.transpose() * w.asDiagonal() * b;
}

} // namespace

TripletCosineTables::TripletCosineTables(const VsaSpace& nn, const VsaSpace& g) {
    if (nn.dimension() != g.dimension()) {
        throw DimensionMismatch("TripletCosineTables: spaces have different dimensions");
    }
    const HyperVector& h = nn.keyword(VsaSpace::kHeadKeyword);
    const HyperVector& r = nn.keyword(VsaSpace::kRelationKeyword);
    const HyperVector& t = nn.keyword(VsaSpace::kTailKeyword);
    // the decomposition below assumes both spaces bind with the same keywords
    if (h != g.keyword(VsaSpace::kHeadKeyword) || r != g.keyword(VsaSpace::kRelationKeyword) ||
        t != g.keyword(VsaSpace::kTailKeyword)) {
        throw InvalidArgument("TripletCosineTables: spaces must share keyword vectors");
    }

    const Eigen::MatrixXd& s = nn.symbols();
    const Eigen::MatrixXd& q = g.symbols();
    const Eigen::VectorXd w_hr = h.cwiseProduct(r);
    const Eigen::VectorXd w_ht = h.cwiseProduct(t);
    const Eigen::VectorXd w_rt = r.cwiseProduct(t);

    plain_ = s.transpose() * q;
    hr_ = weighted_gram(s, w_hr, q);
    ht_ = weighted_gram(s, w_ht, q);
    rt_ = weighted_gram(s, w_rt, q);

    nn_hr_ = weighted_gram(s, w_hr, s);
    nn_ht_ = weighted_gram(s, w_ht, s);
    nn_rt_ = weighted_gram(s, w_rt, s);
    g_hr_ = weighted_gram(q, w_hr, q);
    g_ht_ = weighted_gram(q, w_ht, q);
    g_rt_ = weighted_gram(q, w_rt, q);

    nn_sq_ = s.colwise().squaredNorm();
    g_sq_ = q.colwise().squaredNorm();
}

double TripletCosineTables::dot(const TripletIdx& a, const TripletIdx& b) const {
    return plain_(a.head, b.head) + hr_(a.head, b.rel) + ht_(a.head, b.tail) +
           hr_(a.rel, b.head) + plain_(a.rel, b.rel) + rt_(a.rel, b.tail) +
           ht_(a.tail, b.head) + rt_(a.tail, b.rel) + plain_(a.tail, b.tail);
}

double TripletCosineTables::nn_norm2(const TripletIdx& a) const {
    return nn_sq_[a.head] + nn_sq_[a.rel] + nn_sq_[a.tail] +
           2.0 * (nn_hr_(a.head, a.rel) + nn_ht_(a.head, a.tail) + nn_rt_(a.rel, a.tail));
}

double TripletCosineTables::g_norm2(const TripletIdx& b) const {
    return g_sq_[b.head] + g_sq_[b.rel] + g_sq_[b.tail] +
           2.0 * (g_hr_(b.head, b.rel) + g_ht_(b.head, b.tail) + g_rt_(b.rel, b.tail));
}

double TripletCosineTables::cosine(const TripletIdx& a, const TripletIdx& b) const {
    const double n2 = nn_norm2(a) * g_norm2(b);
    if (n2 <= 0.0) {
        throw UndefinedSimilarity("TripletCosineTables: zero-norm triplet encoding");
    }
    return dot(a, b) / std::sqrt(n2);
}

} // namespace kgalign
