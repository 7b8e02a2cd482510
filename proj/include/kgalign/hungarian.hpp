#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace kgalign {

/// A maximum matching of size min(rows, cols) with minimal total cost.
/// Pairs are listed in ascending row order.
struct Assignment {
    std::vector<std::pair<int, int>> pairs;
    double total_cost = 0.0;
};

struct HungarianOptions {
    /// When set, the returned pair list is the lexicographically smallest
    /// among all optimal assignments. Costs extra solves only when ties
    /// actually exist; turn off in hot loops where any optimum will do.
    bool lexicographic = true;
};

/// Rectangular minimum-cost assignment (Jonker-Volgenant shortest
/// augmenting paths). All costs must be finite; NaN or infinite entries
/// raise InvalidArgument.
Assignment hungarian(const Eigen::MatrixXd& cost, const HungarianOptions& opts = {});

} // namespace kgalign
