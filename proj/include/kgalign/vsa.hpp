#pragma once

#include "kgalign/hypervector.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kgalign {

enum class SymbolKind { Entity, Relation };

/// A named symbol table: the three role keywords (head/relation/tail) plus
/// an ordered set of entity and relation symbols, each carrying one
/// hypervector of a shared dimension.
///
/// A frozen space (trainable == false) only accepts strictly bipolar symbol
/// vectors and is immutable after construction. A trainable space exposes
/// its symbol matrix for in-place optimizer updates; keywords are frozen in
/// both cases.
class VsaSpace {
public:
    static constexpr const char* kHeadKeyword = "H'";
    static constexpr const char* kRelationKeyword = "R'";
    static constexpr const char* kTailKeyword = "T'";

    VsaSpace(std::string name, int dimension, bool trainable);

    /// Installs the three keyword vectors. All must be strictly bipolar.
    void set_keywords(HyperVector head, HyperVector relation, HyperVector tail);

    /// Copies the keywords of another space verbatim (dimensions must agree).
    void copy_keywords_from(const VsaSpace& other);

    bool has_keywords() const { return keywords_set_; }

    /// Keyword lookup by name ("H'", "R'" or "T'"); throws MissingSymbol.
    const HyperVector& keyword(std::string_view name) const;

    /// Adds a symbol and returns its index. Frozen spaces require a strictly
    /// bipolar vector. Duplicate names are rejected.
    int add_symbol(const std::string& name, SymbolKind kind, const HyperVector& v);

    const std::string& name() const { return name_; }
    int dimension() const { return dimension_; }
    bool trainable() const { return trainable_; }
    int symbol_count() const { return static_cast<int>(names_.size()); }

    bool has_symbol(std::string_view name) const;
    int index_of(std::string_view name) const; // throws MissingSymbol
    const std::string& symbol_name(int index) const;
    SymbolKind kind(int index) const;

    /// Column view of one symbol vector.
    Eigen::Ref<const Eigen::VectorXd> symbol(int index) const;
    Eigen::Ref<const Eigen::VectorXd> symbol(std::string_view name) const;

    /// Full D x n symbol matrix (column per symbol, insertion order).
    const Eigen::MatrixXd& symbols() const { return symbols_; }

    /// Mutable access for the optimizer; throws on frozen spaces.
    Eigen::MatrixXd& mutable_symbols();

    std::vector<int> indices_of_kind(SymbolKind kind) const;

    nlohmann::ordered_json to_json() const;
    static VsaSpace from_json(const nlohmann::ordered_json& j);

    /// Frozen space with fresh random bipolar keywords and symbols.
    static VsaSpace random_frozen(std::string name, int dimension,
                                  const std::vector<std::string>& entities,
                                  const std::vector<std::string>& relations,
                                  std::mt19937_64& rng);

    /// Trainable space with uniform(-1, 1) symbols named e0..e{n-1} and
    /// r0..r{m-1}, keywords copied from `keyword_source`.
    static VsaSpace random_trainable(std::string name, int dimension,
                                     int entity_count, int relation_count,
                                     const VsaSpace& keyword_source,
                                     std::mt19937_64& rng);

    /// Same, but with caller-provided symbol names.
    static VsaSpace random_trainable(std::string name, int dimension,
                                     const std::vector<std::string>& entities,
                                     const std::vector<std::string>& relations,
                                     const VsaSpace& keyword_source,
                                     std::mt19937_64& rng);

private:
    std::string name_;
    int dimension_;
    bool trainable_;
    bool keywords_set_ = false;
    std::array<HyperVector, 3> keywords_; // H', R', T'
    std::vector<std::string> names_;
    std::vector<SymbolKind> kinds_;
    std::unordered_map<std::string, int> index_;
    Eigen::MatrixXd symbols_; // dimension_ x n, column per symbol
};

/// One triplet encoded as bind(H',head) + bind(R',relation) + bind(T',tail),
/// together with where it came from. The vector is a snapshot; re-encode
/// after symbol vectors change.
struct TripletVector {
    HyperVector vector;
    std::string space;
    std::string head;
    std::string relation;
    std::string tail;
};

/// Encodes (head, relation, tail) under the current symbol vectors.
TripletVector encode_triplet(const VsaSpace& space, std::string_view head,
                             std::string_view relation, std::string_view tail);

/// Unbinds a role keyword from an encoded triplet. The result is most
/// similar to the filler that was bound under that keyword.
HyperVector query(const VsaSpace& space, const TripletVector& k,
                  std::string_view keyword);

/// Cleanup memory: the stored symbol most cosine-similar to `v`.
/// Ties go to the earliest-inserted symbol.
std::pair<std::string, double> nearest_symbol(const VsaSpace& space,
                                              const HyperVector& v);

} // namespace kgalign
