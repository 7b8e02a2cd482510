#pragma once

#include "kgalign/hungarian.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace kgalign::testing {

/// Exhaustive minimum over all maximum matchings; among optima, picks the
/// lexicographically smallest pair list. Independent of the solver under
/// test; only usable for min(rows, cols) <= ~7.
inline Assignment brute_force_assignment(const Eigen::MatrixXd& cost) {
    const int rows = static_cast<int>(cost.rows());
    const int cols = static_cast<int>(cost.cols());
    const int k = std::min(rows, cols);

    Assignment best;
    best.total_cost = std::numeric_limits<double>::infinity();

    std::vector<int> subset(static_cast<std::size_t>(k));
    std::iota(subset.begin(), subset.end(), 0);
    auto next_subset = [&]() {
        int i = k - 1;
        while (i >= 0 && subset[static_cast<std::size_t>(i)] == rows - k + i) --i;
        if (i < 0) return false;
        ++subset[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) {
            subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
        }
        return true;
    };

    do {
        std::function<void(std::vector<int>&, std::vector<char>&)> rec =
            [&](std::vector<int>& perm, std::vector<char>& used) {
                if (static_cast<int>(perm.size()) == k) {
                    double total = 0.0;
                    std::vector<std::pair<int, int>> pairs;
                    for (int i = 0; i < k; ++i) {
                        pairs.emplace_back(subset[static_cast<std::size_t>(i)],
                                           perm[static_cast<std::size_t>(i)]);
                        total += cost(subset[static_cast<std::size_t>(i)],
                                      perm[static_cast<std::size_t>(i)]);
                    }
                    std::sort(pairs.begin(), pairs.end());
                    if (best.pairs.empty() || total < best.total_cost - 1e-12) {
                        best.total_cost = total;
                        best.pairs = pairs;
                    } else if (total <= best.total_cost + 1e-12 && pairs < best.pairs) {
                        best.total_cost = std::min(total, best.total_cost);
                        best.pairs = pairs;
                    }
                    return;
                }
                for (int c = 0; c < cols; ++c) {
                    if (used[static_cast<std::size_t>(c)]) continue;
                    used[static_cast<std::size_t>(c)] = 1;
                    perm.push_back(c);
                    rec(perm, used);
                    perm.pop_back();
                    used[static_cast<std::size_t>(c)] = 0;
                }
            };
        std::vector<int> perm;
        std::vector<char> used(static_cast<std::size_t>(cols), 0);
        rec(perm, used);
    } while (next_subset());
    return best;
}

} // namespace kgalign::testing
