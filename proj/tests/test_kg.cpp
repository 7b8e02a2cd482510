#include "kgalign/errors.hpp"
#include "kgalign/kg.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <fstream>

using namespace kgalign;

namespace {
const char* kDataDir = KGALIGN_DATA_DIR;
}

TEST_CASE("shipped default graph has the expected shape") {
    const KnowledgeGraph kg = load_kg_json(std::string(kDataDir) + "/kg_g1.json");
    CHECK(kg.entity_count() == 13);
    CHECK(kg.relation_count() == 1);
    CHECK(kg.triplet_count() == 15);
    CHECK(kg.has_triplet(kg.entity_index("zero"), kg.relation_index("contains"),
                         kg.entity_index("curve")));
    CHECK_FALSE(kg.has_triplet(kg.entity_index("one"), kg.relation_index("contains"),
                               kg.entity_index("curve")));
}

TEST_CASE("loader distinguishes parse, name and duplicate errors") {
    auto write_tmp = [](const std::string& name, const std::string& body) {
        const std::string path = "kg_test_" + name + ".json";
        std::ofstream out(path);
        out << body;
        return path;
    };

    CHECK_THROWS_AS(load_kg_json("does_not_exist.json"), KgParseError);
    CHECK_THROWS_AS(load_kg_json(write_tmp("garbled", "{not json")), KgParseError);
    CHECK_THROWS_AS(load_kg_json(write_tmp("schema", R"({"entities": []})")), KgParseError);
    CHECK_THROWS_AS(
        load_kg_json(write_tmp(
            "unknown",
            R"({"entities":["a"],"relations":["r"],"triplets":[["a","r","ghost"]]})")),
        UnknownName);
    CHECK_THROWS_AS(
        load_kg_json(write_tmp(
            "dup",
            R"({"entities":["a","b"],"relations":["r"],"triplets":[["a","r","b"],["a","r","b"]]})")),
        DuplicateTriplet);

    const KnowledgeGraph empty = load_kg_json(
        write_tmp("empty", R"({"entities":["a"],"relations":["r"],"triplets":[]})"));
    CHECK(empty.triplet_count() == 0);
}

TEST_CASE("entity and relation names share one namespace") {
    KnowledgeGraph kg;
    kg.add_entity("thing");
    CHECK_THROWS_AS(kg.add_relation("thing"), KgParseError);
    CHECK_THROWS_AS(kg.add_entity("thing"), KgParseError);
}

TEST_CASE("graph json round-trips") {
    const KnowledgeGraph kg = load_kg_json(std::string(kDataDir) + "/kg_g1.json");
    const KnowledgeGraph kg2 = KnowledgeGraph::from_json(kg.to_json());
    CHECK(kg2.entities() == kg.entities());
    CHECK(kg2.relations() == kg.relations());
    CHECK(kg2.triplets() == kg.triplets());
}
