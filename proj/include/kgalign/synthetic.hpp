#pragma once

#include "kgalign/alignment.hpp"
#include "kgalign/kg.hpp"
#include "kgalign/mnist.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kgalign {

/// One point of the synthetic-graph parameter space. Exactly one axis is
/// swept at a time; everything else stays at these defaults.
struct SyntheticKgSpec {
    int entity_count = 20;
    double relation_proportion = 0.2;
    double triplet_proportion = 0.2;
    /// Unset: uniform coverage (every relation carries its full quota).
    /// Set: per-relation coverage drawn from Normal(0.5, variance
    /// 0.1(1-alpha) + 0.01 alpha), clipped to [0.05, 1].
    std::optional<double> alpha;
    /// >= 1; the network graph gains this proportion of extra anonymous
    /// entities and relations, populated at the same triplet density.
    double nn_concept_ratio = 1.0;
};

struct SyntheticKgPair {
    KnowledgeGraph kg_g;
    KnowledgeGraph kg_nn;
    /// Ground truth: network concept index -> human concept index, -1 for
    /// the surplus anonymous concepts.
    std::vector<int> entity_truth;
    std::vector<int> relation_truth;
};

/// Builds a human graph from the spec and a network graph that is a
/// relabeled copy under a random permutation, extended with surplus
/// concepts when the ratio exceeds 1. Deterministic per seed.
SyntheticKgPair generate_synthetic_kg(const SyntheticKgSpec& spec, std::uint64_t seed);

/// Fraction of the ground-truth correspondence recovered by a concept
/// match over spaces whose symbols carry the graphs' concept names.
double recovered_fraction(const AlignmentReport& report, const SyntheticKgPair& pair);

// ---------------------------------------------------------------------------
// synthetic handwritten-digit corpus

/// Renders a deterministic stand-in corpus in the MNIST layout: 28x28
/// grayscale digits drawn from per-class stroke skeletons with random
/// shift, rotation, scale, stroke width and pixel noise. Useful as a
/// fixture and as a fallback when the canonical files are not available.
MnistDataset render_digit_corpus(int count, std::uint64_t seed);

/// Renders and writes the four canonical-named IDX files into a directory.
void write_digit_corpus(const std::filesystem::path& dir, int train_count, int test_count,
                        std::uint64_t seed);

} // namespace kgalign
