#include "kgalign/vsa.hpp"

#include "kgalign/errors.hpp"

#include <nlohmann/json.hpp>

#include <limits>

namespace kgalign {

namespace {

int keyword_slot(std::string_view name) {
    if (name == VsaSpace::kHeadKeyword) return 0;
    if (name == VsaSpace::kRelationKeyword) return 1;
    if (name == VsaSpace::kTailKeyword) return 2;
    return -1;
}

} // namespace

VsaSpace::VsaSpace(std::string name, int dimension, bool trainable)
    : name_(std::move(name)), dimension_(dimension), trainable_(trainable) {
    if (dimension_ < 1) {
        throw InvalidArgument("VsaSpace: dimension must be >= 1");
    }
    symbols_.resize(dimension_, 0);
}

void VsaSpace::set_keywords(HyperVector head, HyperVector relation, HyperVector tail) {
    const HyperVector* ks[3] = {&head, &relation, &tail};
    for (const auto* k : ks) {
        if (k->size() != dimension_) {
            throw DimensionMismatch("VsaSpace::set_keywords: keyword dimension mismatch");
        }
        if (!is_strictly_bipolar(*k)) {
            throw InvalidArgument("VsaSpace::set_keywords: keywords must be strictly bipolar");
        }
    }
    keywords_[0] = std::move(head);
    keywords_[1] = std::move(relation);
    keywords_[2] = std::move(tail);
    keywords_set_ = true;
}

void VsaSpace::copy_keywords_from(const VsaSpace& other) {
    if (!other.keywords_set_) {
        throw InvalidArgument("VsaSpace::copy_keywords_from: source has no keywords");
    }
    if (other.dimension_ != dimension_) {
        throw DimensionMismatch("VsaSpace::copy_keywords_from: dimension mismatch");
    }
    keywords_ = other.keywords_;
    keywords_set_ = true;
}

const HyperVector& VsaSpace::keyword(std::string_view name) const {
    const int slot = keyword_slot(name);
    if (slot < 0 || !keywords_set_) {
        throw MissingSymbol("VsaSpace: unknown keyword '" + std::string(name) + "'");
    }
    return keywords_[slot];
}

int VsaSpace::add_symbol(const std::string& name, SymbolKind kind, const HyperVector& v) {
    if (v.size() != dimension_) {
        throw DimensionMismatch("VsaSpace::add_symbol: vector dimension " +
                                std::to_string(v.size()) + " != space dimension " +
                                std::to_string(dimension_));
    }
    if (index_.count(name)) {
        throw InvalidArgument("VsaSpace::add_symbol: duplicate symbol '" + name + "'");
    }
    if (!trainable_ && !is_strictly_bipolar(v)) {
        throw InvalidArgument("VsaSpace::add_symbol: frozen space requires strictly bipolar vectors");
    }
    const int idx = symbol_count();
    names_.push_back(name);
    kinds_.push_back(kind);
    index_.emplace(name, idx);
    symbols_.conservativeResize(Eigen::NoChange, idx + 1);
    symbols_.col(idx) = v;
    return idx;
}

bool VsaSpace::has_symbol(std::string_view name) const {
    return index_.count(std::string(name)) > 0;
}

int VsaSpace::index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) {
        throw MissingSymbol("VsaSpace '" + name_ + "': no symbol '" + std::string(name) + "'");
    }
    return it->second;
}

const std::string& VsaSpace::symbol_name(int index) const {
    if (index < 0 || index >= symbol_count()) {
        throw InvalidArgument("VsaSpace::symbol_name: index out of range");
    }
    return names_[static_cast<std::size_t>(index)];
}

SymbolKind VsaSpace::kind(int index) const {
    if (index < 0 || index >= symbol_count()) {
        throw InvalidArgument("VsaSpace::kind: index out of range");
    }
    return kinds_[static_cast<std::size_t>(index)];
}

Eigen::Ref<const Eigen::VectorXd> VsaSpace::symbol(int index) const {
    if (index < 0 || index >= symbol_count()) {
        throw InvalidArgument("VsaSpace::symbol: index out of range");
    }
    return symbols_.col(index);
}

Eigen::Ref<const Eigen::VectorXd> VsaSpace::symbol(std::string_view name) const {
    return symbols_.col(index_of(name));
}

Eigen::MatrixXd& VsaSpace::mutable_symbols() {
    if (!trainable_) {
        throw InvalidArgument("VsaSpace '" + name_ + "' is frozen");
    }
    return symbols_;
}

std::vector<int> VsaSpace::indices_of_kind(SymbolKind kind) const {
    std::vector<int> out;
    for (int i = 0; i < symbol_count(); ++i) {
        if (kinds_[static_cast<std::size_t>(i)] == kind) out.push_back(i);
    }
    return out;
}

nlohmann::ordered_json VsaSpace::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name_;
    j["dimension"] = dimension_;
    auto vec_to_json = [](const HyperVector& v) {
        return std::vector<double>(v.data(), v.data() + v.size());
    };
    nlohmann::ordered_json kw;
    if (keywords_set_) {
        kw[kHeadKeyword] = vec_to_json(keywords_[0]);
        kw[kRelationKeyword] = vec_to_json(keywords_[1]);
        kw[kTailKeyword] = vec_to_json(keywords_[2]);
    }
    j["keywords"] = kw;
    nlohmann::ordered_json syms;
    nlohmann::ordered_json kinds;
    for (int i = 0; i < symbol_count(); ++i) {
        const auto& nm = names_[static_cast<std::size_t>(i)];
        syms[nm] = vec_to_json(symbols_.col(i));
        kinds[nm] = kinds_[static_cast<std::size_t>(i)] == SymbolKind::Entity
                        ? "entity"
                        : "relation";
    }
    j["symbols"] = syms;
    j["kinds"] = kinds;
    j["trainable"] = trainable_;
    return j;
}

VsaSpace VsaSpace::from_json(const nlohmann::ordered_json& j) {
    try {
        VsaSpace space(j.at("name").get<std::string>(), j.at("dimension").get<int>(),
                       j.at("trainable").get<bool>());
        auto json_to_vec = [](const nlohmann::ordered_json& a) {
            std::vector<double> vals = a.get<std::vector<double>>();
            return Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                                     static_cast<Eigen::Index>(vals.size()))
                .eval();
        };
        const auto& kw = j.at("keywords");
        if (kw.contains(kHeadKeyword)) {
            space.set_keywords(json_to_vec(kw.at(kHeadKeyword)),
                               json_to_vec(kw.at(kRelationKeyword)),
                               json_to_vec(kw.at(kTailKeyword)));
        }
        const auto& kinds = j.contains("kinds") ? j.at("kinds") : nlohmann::ordered_json::object();
        for (const auto& [nm, arr] : j.at("symbols").items()) {
            SymbolKind kind = SymbolKind::Entity;
            if (kinds.contains(nm) && kinds.at(nm).get<std::string>() == "relation") {
                kind = SymbolKind::Relation;
            }
            space.add_symbol(nm, kind, json_to_vec(arr));
        }
        return space;
    } catch (const nlohmann::json::exception& e) {
        throw KgParseError(std::string("VsaSpace::from_json: ") + e.what());
    }
}

VsaSpace VsaSpace::random_frozen(std::string name, int dimension,
                                 const std::vector<std::string>& entities,
                                 const std::vector<std::string>& relations,
                                 std::mt19937_64& rng) {
    VsaSpace space(std::move(name), dimension, /*trainable=*/false);
    HyperVector h = random_bipolar(dimension, rng);
    HyperVector r = random_bipolar(dimension, rng);
    HyperVector t = random_bipolar(dimension, rng);
    space.set_keywords(std::move(h), std::move(r), std::move(t));
    for (const auto& e : entities) {
        space.add_symbol(e, SymbolKind::Entity, random_bipolar(dimension, rng));
    }
    for (const auto& rel : relations) {
        space.add_symbol(rel, SymbolKind::Relation, random_bipolar(dimension, rng));
    }
    return space;
}

VsaSpace VsaSpace::random_trainable(std::string name, int dimension,
                                    int entity_count, int relation_count,
                                    const VsaSpace& keyword_source,
                                    std::mt19937_64& rng) {
    if (entity_count < 0 || relation_count < 0) {
        throw InvalidArgument("VsaSpace::random_trainable: negative symbol count");
    }
    std::vector<std::string> entities, relations;
    for (int i = 0; i < entity_count; ++i) entities.push_back("e" + std::to_string(i));
    for (int i = 0; i < relation_count; ++i) relations.push_back("r" + std::to_string(i));
    return random_trainable(std::move(name), dimension, entities, relations, keyword_source,
                            rng);
}

VsaSpace VsaSpace::random_trainable(std::string name, int dimension,
                                    const std::vector<std::string>& entities,
                                    const std::vector<std::string>& relations,
                                    const VsaSpace& keyword_source,
                                    std::mt19937_64& rng) {
    VsaSpace space(std::move(name), dimension, /*trainable=*/true);
    space.copy_keywords_from(keyword_source);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto draw = [&] {
        HyperVector v(dimension);
        for (int k = 0; k < dimension; ++k) v[k] = uni(rng);
        return v;
    };
    for (const auto& e : entities) {
        space.add_symbol(e, SymbolKind::Entity, draw());
    }
    for (const auto& r : relations) {
        space.add_symbol(r, SymbolKind::Relation, draw());
    }
    return space;
}

TripletVector encode_triplet(const VsaSpace& space, std::string_view head,
                             std::string_view relation, std::string_view tail) {
    const HyperVector& h = space.keyword(VsaSpace::kHeadKeyword);
    const HyperVector& r = space.keyword(VsaSpace::kRelationKeyword);
    const HyperVector& t = space.keyword(VsaSpace::kTailKeyword);
    Eigen::Ref<const Eigen::VectorXd> a = space.symbol(head);
    Eigen::Ref<const Eigen::VectorXd> b = space.symbol(relation);
    Eigen::Ref<const Eigen::VectorXd> c = space.symbol(tail);
    TripletVector out;
    out.vector = h.cwiseProduct(a) + r.cwiseProduct(b) + t.cwiseProduct(c);
    out.space = space.name();
    out.head = std::string(head);
    out.relation = std::string(relation);
    out.tail = std::string(tail);
    return out;
}

HyperVector query(const VsaSpace& space, const TripletVector& k,
                  std::string_view keyword) {
    return bind(k.vector, space.keyword(keyword));
}

std::pair<std::string, double> nearest_symbol(const VsaSpace& space,
                                              const HyperVector& v) {
    if (space.symbol_count() == 0) {
        throw InvalidArgument("nearest_symbol: space has no symbols");
    }
    if (v.norm() == 0.0) {
        throw UndefinedSimilarity("nearest_symbol: zero query vector");
    }
    int best = 0;
    double best_cos = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < space.symbol_count(); ++i) {
        const double c = cosine(v, space.symbols().col(i));
        if (c > best_cos) { // strict: ties keep the earliest symbol
            best_cos = c;
            best = i;
        }
    }
    return {space.symbol_name(best), best_cos};
}

} // namespace kgalign
