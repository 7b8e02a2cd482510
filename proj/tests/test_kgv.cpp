#include "kgalign/errors.hpp"
#include "kgalign/kgv.hpp"

#include <doctest.h>

#include <random>

using namespace kgalign;

TEST_CASE("kgv_to_triplets thresholding") {
    KgvTensor kgv = KgvTensor::zeros(2, 1, 4);
    CHECK(kgv_to_triplets(kgv, 0).empty());

    kgv.at(0, 0, 2, 3) = 0.9;
    const auto trips = kgv_to_triplets(kgv, 0, 0.5);
    REQUIRE(trips.size() == 1);
    CHECK(trips[0] == Triplet{2, 0, 3});
    CHECK(kgv_to_triplets(kgv, 1).empty());

    // the assertion threshold is inclusive
    kgv.at(0, 0, 1, 1) = 0.5;
    CHECK(kgv_to_triplets(kgv, 0, 0.5).size() == 2);

    CHECK_THROWS_AS(kgv_to_triplets(kgv, 2, 0.5), InvalidArgument);
    CHECK_THROWS_AS(kgv_to_triplets(kgv, 0, 0.0), InvalidArgument);
}

TEST_CASE("kgv_to_triplets orders by (relation, head, tail)") {
    KgvTensor kgv = KgvTensor::zeros(1, 2, 3);
    kgv.at(0, 1, 0, 0) = 1.0;
    kgv.at(0, 0, 2, 1) = 1.0;
    kgv.at(0, 0, 2, 0) = 1.0;
    const auto trips = kgv_to_triplets(kgv, 0);
    REQUIRE(trips.size() == 3);
    CHECK(trips[0] == Triplet{2, 0, 0});
    CHECK(trips[1] == Triplet{2, 0, 1});
    CHECK(trips[2] == Triplet{0, 1, 0});
}

TEST_CASE("triplets_to_kgv inverts the translation") {
    KnowledgeGraph kg;
    for (int i = 0; i < 5; ++i) kg.add_entity("e" + std::to_string(i));
    kg.add_relation("r0");
    CHECK(triplets_to_kgv(kg, 2).values.isZero());

    kg.add_triplet(2, 0, 3);
    const KgvTensor kgv = triplets_to_kgv(kg, 3);
    CHECK(kgv.batch() == 3);
    for (int a = 0; a < 3; ++a) {
        CHECK(kgv.values.row(a).sum() == doctest::Approx(1.0));
        CHECK(kgv.at(a, 0, 2, 3) == 1.0);
    }
}

TEST_CASE("translation round-trip on random graphs") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        KnowledgeGraph kg;
        std::uniform_int_distribution<int> ne(2, 64);
        std::uniform_int_distribution<int> nr(1, 3);
        const int n_e = ne(rng);
        const int n_r = nr(rng);
        for (int i = 0; i < n_e; ++i) kg.add_entity("e" + std::to_string(i));
        for (int i = 0; i < n_r; ++i) kg.add_relation("r" + std::to_string(i));
        std::uniform_int_distribution<int> pe(0, n_e - 1), pr(0, n_r - 1);
        for (int k = 0; k < 30; ++k) {
            const int h = pe(rng), r = pr(rng), t = pe(rng);
            if (!kg.has_triplet(h, r, t)) kg.add_triplet(h, r, t);
        }

        const auto back = kgv_to_triplets(triplets_to_kgv(kg, 1), 0, 0.5);
        std::vector<Triplet> expected = kg.triplets();
        std::vector<Triplet> got = back;
        std::sort(expected.begin(), expected.end());
        std::sort(got.begin(), got.end());
        CHECK(got == expected);
    }
}

namespace {

/// The spec'd toy: one human triplet (zero, contains, curve) and four
/// network concepts mapped as n1->zero, n2->contains, n3->curve,
/// n4->straight.
struct ConflictToy {
    KnowledgeGraph kg_g;
    SigmaIndex sigma;

    ConflictToy() {
        kg_g.add_entity("zero");
        kg_g.add_entity("curve");
        kg_g.add_entity("straight");
        kg_g.add_relation("contains");
        kg_g.add_triplet("zero", "contains", "curve");

        sigma.entity = {0 /*n1->zero*/, 1 /*n3->curve*/, 2 /*n4->straight*/, -1};
        sigma.relation = {0 /*n2->contains*/};
    }
};

} // namespace

TEST_CASE("conflict targets follow the closed world per class head") {
    ConflictToy toy;
    const std::vector<int> labels = {0};
    const std::vector<int> class_entity = {0}; // class 0 -> "zero"

    const TargetMask mask =
        build_conflict_targets(toy.kg_g, toy.sigma, labels, class_entity, 1, 4);

    // head row for the class entity: mapped tails become active
    const auto cell = [&](int b, int c, int d) { return (b * 4 + c) * 4 + d; };
    CHECK(mask.active(0, cell(0, 0, 1)) == 1); // (n2, n1, n3)
    CHECK(mask.targets(0, cell(0, 0, 1)) == 1.0);
    CHECK(mask.active(0, cell(0, 0, 2)) == 1); // (n2, n1, n4): absent -> 0
    CHECK(mask.targets(0, cell(0, 0, 2)) == 0.0);
    CHECK(mask.active(0, cell(0, 0, 3)) == 0); // unmapped tail
    CHECK(mask.active(0, cell(0, 1, 1)) == 0); // head is not the class entity
    CHECK(mask.active(0, cell(0, 3, 1)) == 0);

    // exhaustive: every active cell has the class-entity head and mapped
    // relation and tail
    long active = 0;
    for (int b = 0; b < 1; ++b) {
        for (int c = 0; c < 4; ++c) {
            for (int d = 0; d < 4; ++d) {
                if (mask.active(0, cell(b, c, d))) {
                    ++active;
                    CHECK(toy.sigma.entity[c] == 0);
                    CHECK(toy.sigma.relation[b] >= 0);
                    CHECK(toy.sigma.entity[d] >= 0);
                }
            }
        }
    }
    CHECK(active == 3); // tails n1, n3, n4... n1 itself maps to zero, so
                        // (zero, contains, zero) is also supervised to 0
}

TEST_CASE("flipping graph membership flips the target bit") {
    ConflictToy toy;
    const std::vector<int> labels = {0};
    const std::vector<int> class_entity = {0};
    const auto cell = [&](int b, int c, int d) { return (b * 4 + c) * 4 + d; };

    const TargetMask before =
        build_conflict_targets(toy.kg_g, toy.sigma, labels, class_entity, 1, 4);
    toy.kg_g.add_triplet("zero", "contains", "straight");
    const TargetMask after =
        build_conflict_targets(toy.kg_g, toy.sigma, labels, class_entity, 1, 4);
    CHECK(before.targets(0, cell(0, 0, 2)) == 0.0);
    CHECK(after.targets(0, cell(0, 0, 2)) == 1.0);

    toy.kg_g.remove_triplet(0, 0, 1);
    const TargetMask removed =
        build_conflict_targets(toy.kg_g, toy.sigma, labels, class_entity, 1, 4);
    CHECK(removed.targets(0, cell(0, 0, 1)) == 0.0);
}

TEST_CASE("empty sigma and unmapped class entities give inactive masks") {
    ConflictToy toy;
    SigmaIndex empty;
    empty.entity.assign(4, -1);
    empty.relation.assign(1, -1);
    const TargetMask mask =
        build_conflict_targets(toy.kg_g, empty, {0}, {0}, 1, 4);
    CHECK(mask.active_count() == 0);

    // class entity exists but no network concept maps to it
    SigmaIndex partial = toy.sigma;
    partial.entity[0] = -1;
    const TargetMask mask2 =
        build_conflict_targets(toy.kg_g, partial, {0}, {0}, 1, 4);
    CHECK(mask2.active_count() == 0);

    CHECK_THROWS_AS(build_conflict_targets(toy.kg_g, toy.sigma, {5}, {0}, 1, 4),
                    InvalidArgument);
}
