#include "kgalign/errors.hpp"
#include "kgalign/vsa.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

using namespace kgalign;

namespace {

VsaSpace frozen_space(int dimension, int entities, std::uint64_t seed, int relations = 1) {
    std::mt19937_64 rng(seed);
    std::vector<std::string> e_names, r_names;
    for (int i = 0; i < entities; ++i) e_names.push_back("s" + std::to_string(i));
    for (int i = 0; i < relations; ++i) r_names.push_back("rel" + std::to_string(i));
    return VsaSpace::random_frozen("g", dimension, e_names, r_names, rng);
}

} // namespace

TEST_CASE("encode_triplet matches the hand-computed 2-D example") {
    VsaSpace space("toy", 2, /*trainable=*/true);
    HyperVector h(2), r(2), t(2);
    h << 1, 1;
    r << 1, -1;
    t << -1, 1;
    space.set_keywords(h, r, t);
    HyperVector a(2), b(2), c(2);
    a << 1, -1;
    b << -1, -1;
    c << 1, 1;
    space.add_symbol("A", SymbolKind::Entity, a);
    space.add_symbol("B", SymbolKind::Relation, b);
    space.add_symbol("C", SymbolKind::Entity, c);

    const TripletVector k = encode_triplet(space, "A", "B", "C");
    HyperVector expected(2);
    expected << -1, 1;
    CHECK(k.vector == expected);

    CHECK_THROWS_AS(encode_triplet(space, "A", "B", "missing"), MissingSymbol);
}

TEST_CASE("re-encoding reflects updated symbol vectors") {
    std::mt19937_64 rng(3);
    VsaSpace g = frozen_space(64, 3, 1);
    VsaSpace nn = VsaSpace::random_trainable("nn", 64, 3, 1, g, rng);
    const TripletVector before = encode_triplet(nn, "e0", "r0", "e1");
    const TripletVector again = encode_triplet(nn, "e0", "r0", "e1");
    CHECK(before.vector == again.vector);

    nn.mutable_symbols().col(0).setConstant(0.5);
    const TripletVector after = encode_triplet(nn, "e0", "r0", "e1");
    CHECK(before.vector != after.vector);
}

TEST_CASE("triplets with disjoint fillers encode nearly orthogonally at D=1024") {
    std::mt19937_64 seeds(77);
    for (int trial = 0; trial < 60; ++trial) {
        VsaSpace g = frozen_space(1024, 6, seeds(), 2);
        const TripletVector k1 = encode_triplet(g, "s0", "rel0", "s1");
        const TripletVector k2 = encode_triplet(g, "s2", "rel1", "s3");
        CHECK(std::abs(cosine(k1.vector, k2.vector)) <= 0.3);
    }
}

TEST_CASE("one shared filler raises encoding similarity to about a third") {
    // sharing exactly one role's filler contributes D to the dot product
    // against norms of roughly 3D, so cos concentrates near 1/3
    std::mt19937_64 seeds(78);
    double sum = 0.0;
    const int trials = 60;
    for (int trial = 0; trial < trials; ++trial) {
        VsaSpace g = frozen_space(1024, 6, seeds());
        sum += cosine(encode_triplet(g, "s0", "rel0", "s1").vector,
                      encode_triplet(g, "s2", "rel0", "s3").vector);
    }
    CHECK(sum / trials == doctest::Approx(1.0 / 3.0).epsilon(0.05));
}

TEST_CASE("query retrieves the bound filler") {
    // over random frozen spaces, unbinding the head keyword must leave a
    // vector closest to the head symbol, at cosine near 1/sqrt(3)
    std::mt19937_64 seeds(123);
    int hits = 0;
    double cos_sum = 0.0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        VsaSpace g = frozen_space(1024, 8, seeds());
        const TripletVector k = encode_triplet(g, "s0", "rel0", "s1");
        const HyperVector v = query(g, k, VsaSpace::kHeadKeyword);
        const auto [name, cos] = nearest_symbol(g, v);
        if (name == "s0") ++hits;
        cos_sum += cosine(v, g.symbol("s0"));
    }
    CHECK(hits == trials);
    const double mean_cos = cos_sum / trials;
    CHECK(mean_cos >= 0.5);
    CHECK(mean_cos == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(0.05));
}

TEST_CASE("query of a single bound pair is exact for bipolar keywords") {
    std::mt19937_64 rng(9);
    VsaSpace g = frozen_space(256, 2, 4);
    TripletVector tv;
    tv.vector = bind(g.symbol("s0"), g.keyword(VsaSpace::kHeadKeyword));
    const HyperVector back = query(g, tv, VsaSpace::kHeadKeyword);
    CHECK(back == g.symbol("s0"));

    CHECK_THROWS_AS(query(g, tv, "Q'"), MissingSymbol);
}

TEST_CASE("nearest_symbol exact copy, tie-break and zero input") {
    VsaSpace space("s", 2, /*trainable=*/true);
    std::mt19937_64 rng(4);
    VsaSpace kw = frozen_space(2, 0, 11, 1);
    space.copy_keywords_from(kw);
    HyperVector e1(2), e2(2);
    e1 << 1, 0;
    e2 << 1, 0;
    space.add_symbol("first", SymbolKind::Entity, e1);
    space.add_symbol("second", SymbolKind::Entity, e2);

    const auto [name, cos] = nearest_symbol(space, e1);
    CHECK(name == "first"); // tie goes to insertion order
    CHECK(cos == doctest::Approx(1.0));

    HyperVector orth(2);
    orth << 0, 1;
    CHECK(nearest_symbol(space, orth).first == "first");

    CHECK_THROWS_AS(nearest_symbol(space, HyperVector::Zero(2)), UndefinedSimilarity);
}

TEST_CASE("query retrieval holds at scale") {
    // frozen space with 64 symbols: head retrieval from full triplet
    // encodings should essentially never miss
    std::mt19937_64 seeds(2025);
    VsaSpace g = frozen_space(1024, 64, seeds(), 2);
    std::mt19937_64 pick(55);
    std::uniform_int_distribution<int> entity(0, 63);
    std::uniform_int_distribution<int> rel(0, 1);
    int hits = 0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
        const std::string h = "s" + std::to_string(entity(pick));
        const std::string r = "rel" + std::to_string(rel(pick));
        const std::string t = "s" + std::to_string(entity(pick));
        const TripletVector k = encode_triplet(g, h, r, t);
        if (nearest_symbol(g, query(g, k, VsaSpace::kHeadKeyword)).first == h) ++hits;
    }
    CHECK(hits >= 990);
}

TEST_CASE("frozen spaces reject non-bipolar symbols and stay immutable") {
    VsaSpace g = frozen_space(16, 2, 6);
    HyperVector soft = HyperVector::Constant(16, 0.5);
    CHECK_THROWS_AS(g.add_symbol("bad", SymbolKind::Entity, soft), InvalidArgument);
    CHECK_THROWS_AS(g.mutable_symbols(), InvalidArgument);
    CHECK_THROWS_AS(g.add_symbol("s0", SymbolKind::Entity, g.symbol(0).eval()), InvalidArgument);
}

TEST_CASE("space json round-trips at full precision") {
    std::mt19937_64 rng(14);
    VsaSpace g = frozen_space(32, 3, 21);
    VsaSpace nn = VsaSpace::random_trainable("nn", 32, 4, 2, g, rng);

    const VsaSpace nn2 = VsaSpace::from_json(nn.to_json());
    CHECK(nn2.name() == nn.name());
    CHECK(nn2.dimension() == nn.dimension());
    CHECK(nn2.trainable() == nn.trainable());
    CHECK(nn2.symbol_count() == nn.symbol_count());
    CHECK(nn2.symbols() == nn.symbols()); // bitwise
    for (int i = 0; i < nn.symbol_count(); ++i) {
        CHECK(nn2.symbol_name(i) == nn.symbol_name(i));
        CHECK(nn2.kind(i) == nn.kind(i));
    }
    CHECK(nn2.keyword(VsaSpace::kHeadKeyword) == nn.keyword(VsaSpace::kHeadKeyword));

    const VsaSpace g2 = VsaSpace::from_json(g.to_json());
    CHECK(g2.symbols() == g.symbols());
    CHECK_FALSE(g2.trainable());
}
