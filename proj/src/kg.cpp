#include "kgalign/kg.hpp"

#include "kgalign/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>

namespace kgalign {

namespace {

int find_name(const std::vector<std::string>& names, std::string_view name) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

} // namespace

int KnowledgeGraph::add_entity(const std::string& name) {
    if (find_name(entities_, name) >= 0 || find_name(relations_, name) >= 0) {
        throw KgParseError("KnowledgeGraph: name '" + name + "' already in use");
    }
    entities_.push_back(name);
    return entity_count() - 1;
}

int KnowledgeGraph::add_relation(const std::string& name) {
    if (find_name(entities_, name) >= 0 || find_name(relations_, name) >= 0) {
        throw KgParseError("KnowledgeGraph: name '" + name + "' already in use");
    }
    relations_.push_back(name);
    return relation_count() - 1;
}

void KnowledgeGraph::add_triplet(int head, int relation, int tail) {
    if (head < 0 || head >= entity_count() || tail < 0 || tail >= entity_count() ||
        relation < 0 || relation >= relation_count()) {
        throw InvalidArgument("KnowledgeGraph::add_triplet: index out of range");
    }
    const Triplet t{head, relation, tail};
    auto it = std::lower_bound(triplets_.begin(), triplets_.end(), t);
    if (it != triplets_.end() && *it == t) {
        throw DuplicateTriplet("KnowledgeGraph: duplicate triplet (" +
                               entities_[static_cast<std::size_t>(head)] + ", " +
                               relations_[static_cast<std::size_t>(relation)] + ", " +
                               entities_[static_cast<std::size_t>(tail)] + ")");
    }
    triplets_.insert(it, t);
}

void KnowledgeGraph::add_triplet(const std::string& head, const std::string& relation,
                                 const std::string& tail) {
    add_triplet(entity_index(head), relation_index(relation), entity_index(tail));
}

void KnowledgeGraph::remove_triplet(int head, int relation, int tail) {
    const Triplet t{head, relation, tail};
    auto it = std::lower_bound(triplets_.begin(), triplets_.end(), t);
    if (it == triplets_.end() || *it != t) {
        throw InvalidArgument("KnowledgeGraph::remove_triplet: no such triplet");
    }
    triplets_.erase(it);
}

bool KnowledgeGraph::has_triplet(int head, int relation, int tail) const {
    const Triplet t{head, relation, tail};
    return std::binary_search(triplets_.begin(), triplets_.end(), t);
}

int KnowledgeGraph::entity_index(std::string_view name) const {
    const int i = find_name(entities_, name);
    if (i < 0) throw UnknownName("KnowledgeGraph: unknown entity '" + std::string(name) + "'");
    return i;
}

int KnowledgeGraph::relation_index(std::string_view name) const {
    const int i = find_name(relations_, name);
    if (i < 0) throw UnknownName("KnowledgeGraph: unknown relation '" + std::string(name) + "'");
    return i;
}

nlohmann::ordered_json KnowledgeGraph::to_json() const {
    nlohmann::ordered_json j;
    j["entities"] = entities_;
    j["relations"] = relations_;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& t : triplets_) {
        arr.push_back({entities_[static_cast<std::size_t>(t.head)],
                       relations_[static_cast<std::size_t>(t.relation)],
                       entities_[static_cast<std::size_t>(t.tail)]});
    }
    j["triplets"] = arr;
    return j;
}

KnowledgeGraph KnowledgeGraph::from_json(const nlohmann::ordered_json& j) {
    KnowledgeGraph kg;
    std::vector<std::string> entities;
    std::vector<std::string> relations;
    std::vector<std::array<std::string, 3>> triplets;
    try {
        entities = j.at("entities").get<std::vector<std::string>>();
        relations = j.at("relations").get<std::vector<std::string>>();
        for (const auto& t : j.at("triplets")) {
            if (!t.is_array() || t.size() != 3) {
                throw KgParseError("KnowledgeGraph: each triplet must be [head, relation, tail]");
            }
            triplets.push_back({t[0].get<std::string>(), t[1].get<std::string>(),
                                t[2].get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw KgParseError(std::string("KnowledgeGraph: malformed JSON: ") + e.what());
    }
    for (const auto& e : entities) kg.add_entity(e);
    for (const auto& r : relations) kg.add_relation(r);
    for (const auto& [h, r, t] : triplets) kg.add_triplet(h, r, t);
    return kg;
}

KnowledgeGraph load_kg_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw KgParseError("load_kg_json: cannot open '" + path.string() + "'");
    }
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw KgParseError("load_kg_json: parse failure in '" + path.string() + "': " + e.what());
    }
    return KnowledgeGraph::from_json(j);
}

void save_kg_json(const KnowledgeGraph& kg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw KgParseError("save_kg_json: cannot open '" + path.string() + "' for writing");
    }
    out << kg.to_json().dump(2) << "\n";
}

} // namespace kgalign
