#pragma once

#include <Eigen/Core>

#include <random>
#include <vector>

namespace kgalign {

/// A D-dimensional real vector carrying one symbol or one encoded triplet.
/// Strictly bipolar vectors have every component in {-1, +1}; those enjoy
/// the exact self-inverse property of bind.
using HyperVector = Eigen::VectorXd;

/// Draws a strictly bipolar vector, each component independently -1 or +1
/// with probability 1/2. Deterministic given the generator state.
HyperVector random_bipolar(int dimension, std::mt19937_64& rng);

/// bind: elementwise multiplication. For strictly bipolar `a`,
/// bind(bind(a, b), a) == b exactly, and bind(a, b) is nearly orthogonal
/// to both operands for independent random inputs.
HyperVector bind(const HyperVector& a, const HyperVector& b);

/// bundle: elementwise addition over a non-empty list. The result stays
/// partially similar to every operand. No normalization is applied; cosine
/// similarity is scale-invariant, so none is needed.
HyperVector bundle(const std::vector<HyperVector>& vs);

/// Cosine similarity in [-1, 1]. Throws UndefinedSimilarity on zero input.
double cosine(const HyperVector& a, const HyperVector& b);

/// True when every component is exactly -1 or +1.
bool is_strictly_bipolar(const HyperVector& v);

} // namespace kgalign
