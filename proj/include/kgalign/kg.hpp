#pragma once

#include <nlohmann/json_fwd.hpp>

#include <compare>
#include <filesystem>
#include <string>
#include <vector>

namespace kgalign {

/// (head, relation, tail) by index into the owning graph's name lists.
struct Triplet {
    int head = 0;
    int relation = 0;
    int tail = 0;

    auto operator<=>(const Triplet&) const = default;
};

/// Entities, relations and a duplicate-free set of triplets. Indices are
/// positions in the (insertion-ordered) name lists; entity and relation
/// names never collide.
class KnowledgeGraph {
public:
    int add_entity(const std::string& name);
    int add_relation(const std::string& name);

    /// Throws DuplicateTriplet on repeats and InvalidArgument on bad indices.
    void add_triplet(int head, int relation, int tail);
    void add_triplet(const std::string& head, const std::string& relation,
                     const std::string& tail); // throws UnknownName

    void remove_triplet(int head, int relation, int tail);

    int entity_count() const { return static_cast<int>(entities_.size()); }
    int relation_count() const { return static_cast<int>(relations_.size()); }
    int triplet_count() const { return static_cast<int>(triplets_.size()); }

    const std::vector<std::string>& entities() const { return entities_; }
    const std::vector<std::string>& relations() const { return relations_; }

    /// Triplets sorted by (head, relation, tail).
    const std::vector<Triplet>& triplets() const { return triplets_; }

    bool has_triplet(int head, int relation, int tail) const;
    int entity_index(std::string_view name) const;   // throws UnknownName
    int relation_index(std::string_view name) const; // throws UnknownName

    nlohmann::ordered_json to_json() const;
    static KnowledgeGraph from_json(const nlohmann::ordered_json& j);

private:
    std::vector<std::string> entities_;
    std::vector<std::string> relations_;
    std::vector<Triplet> triplets_; // kept sorted for binary search
};

/// Reads the JSON graph format:
///   {"entities": [...], "relations": [...], "triplets": [["h","r","t"], ...]}
/// Names are case-sensitive; unknown names and duplicate triplets are
/// distinct errors from a malformed file.
KnowledgeGraph load_kg_json(const std::filesystem::path& path);

void save_kg_json(const KnowledgeGraph& kg, const std::filesystem::path& path);

} // namespace kgalign
