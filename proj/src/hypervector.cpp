#include "kgalign/hypervector.hpp"

#include "kgalign/errors.hpp"

#include <cmath>

namespace kgalign {

HyperVector random_bipolar(int dimension, std::mt19937_64& rng) {
    if (dimension < 1) {
        throw InvalidArgument("random_bipolar: dimension must be >= 1");
    }
    HyperVector v(dimension);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int k = 0; k < dimension; ++k) {
        v[k] = coin(rng) ? 1.0 : -1.0;
    }
    return v;
}

HyperVector bind(const HyperVector& a, const HyperVector& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("bind: operands have dimensions " +
                                std::to_string(a.size()) + " and " +
                                std::to_string(b.size()));
    }
    return a.cwiseProduct(b);
}

HyperVector bundle(const std::vector<HyperVector>& vs) {
    if (vs.empty()) {
        throw InvalidArgument("bundle: empty operand list");
    }
    HyperVector out = vs.front();
    for (std::size_t i = 1; i < vs.size(); ++i) {
        if (vs[i].size() != out.size()) {
            throw DimensionMismatch("bundle: operand " + std::to_string(i) +
                                    " has mismatched dimension");
        }
        out += vs[i];
    }
    return out;
}

double cosine(const HyperVector& a, const HyperVector& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("cosine: operands have dimensions " +
                                std::to_string(a.size()) + " and " +
                                std::to_string(b.size()));
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        throw UndefinedSimilarity("cosine: zero vector has no direction");
    }
    return a.dot(b) / (na * nb);
}

bool is_strictly_bipolar(const HyperVector& v) {
    for (int k = 0; k < v.size(); ++k) {
        if (v[k] != 1.0 && v[k] != -1.0) return false;
    }
    return v.size() > 0;
}

} // namespace kgalign
