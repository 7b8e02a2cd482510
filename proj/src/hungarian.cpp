#include "kgalign/hungarian.hpp"

#include "kgalign/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kgalign {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct JvResult {
    std::vector<int> row_to_col; // size rows
    std::vector<double> u;       // row potentials
    std::vector<double> v;       // column potentials
    double total = 0.0;
};

// Shortest-augmenting-path assignment for rows <= cols. Scan order is
// fixed, so the result is deterministic for a given matrix.
JvResult jv_rows_le_cols(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(m) + 1, 0);
    std::vector<int> way(static_cast<std::size_t>(m) + 1, 0);
    std::vector<double> minv(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<char> used(static_cast<std::size_t>(m) + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    JvResult res;
    res.row_to_col.assign(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= m; ++j) {
        if (p[static_cast<std::size_t>(j)] != 0) {
            res.row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
        }
    }
    res.u.assign(u.begin() + 1, u.end());
    res.v.assign(v.begin() + 1, v.end());
    for (int i = 0; i < n; ++i) {
        res.total += cost(i, res.row_to_col[static_cast<std::size_t>(i)]);
    }
    return res;
}

// Orientation-agnostic solve; pairs come back in original (row, col) terms.
Assignment jv_solve(const Eigen::MatrixXd& cost) {
    Assignment out;
    if (cost.rows() == 0 || cost.cols() == 0) return out;
    if (cost.rows() <= cost.cols()) {
        JvResult r = jv_rows_le_cols(cost);
        out.total_cost = r.total;
        for (int i = 0; i < cost.rows(); ++i) {
            out.pairs.emplace_back(i, r.row_to_col[static_cast<std::size_t>(i)]);
        }
    } else {
        JvResult r = jv_rows_le_cols(cost.transpose());
        out.total_cost = r.total;
        for (int j = 0; j < cost.cols(); ++j) {
            out.pairs.emplace_back(r.row_to_col[static_cast<std::size_t>(j)], j);
        }
        std::sort(out.pairs.begin(), out.pairs.end());
    }
    return out;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& cost, const std::vector<int>& rows,
                          const std::vector<int>& cols) {
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                cost(rows[i], cols[j]);
        }
    }
    return sub;
}

// Rewrites `base` into the lexicographically smallest pair list among all
// minimum-cost assignments. Row by row, the smallest column whose forced
// choice still completes to the optimal total wins; candidates are screened
// through the dual potentials, so unique optima cost no extra solves.
void lexicographic_refine(const Eigen::MatrixXd& cost, const JvResult& oriented,
                          bool transposed, Assignment& base) {
    const int rows = static_cast<int>(cost.rows());
    const int cols = static_cast<int>(cost.cols());
    const int k = std::min(rows, cols);
    const double scale = 1.0 + cost.cwiseAbs().maxCoeff();
    const double tol = 1e-9 * scale;
    const double verify_tol = 10.0 * tol;

    const std::vector<double>& row_pot = transposed ? oriented.v : oriented.u;
    const std::vector<double>& col_pot = transposed ? oriented.u : oriented.v;

    std::vector<char> col_used(static_cast<std::size_t>(cols), 0);
    std::vector<std::pair<int, int>> fixed;
    double fixed_cost = 0.0;

    auto remaining_cols = [&] {
        std::vector<int> cs;
        for (int c = 0; c < cols; ++c) {
            if (!col_used[static_cast<std::size_t>(c)]) cs.push_back(c);
        }
        return cs;
    };

    for (int r = 0; r < rows && static_cast<int>(fixed.size()) < k; ++r) {
        std::vector<int> cands;
        for (int c = 0; c < cols; ++c) {
            if (col_used[static_cast<std::size_t>(c)]) continue;
            const double rc = cost(r, c) - row_pot[static_cast<std::size_t>(r)] -
                              col_pot[static_cast<std::size_t>(c)];
            if (rc <= tol) cands.push_back(c);
        }
        int chosen = -1;
        if (rows <= cols && cands.size() == 1) {
            // every row is matched in every optimum; a single tight edge
            // leaves no alternative
            chosen = cands.front();
        } else {
            std::vector<int> sub_rows;
            for (int rr = r + 1; rr < rows; ++rr) sub_rows.push_back(rr);
            const int needed = k - static_cast<int>(fixed.size()) - 1;
            for (int c : cands) {
                std::vector<int> sub_cols;
                for (int cc = 0; cc < cols; ++cc) {
                    if (!col_used[static_cast<std::size_t>(cc)] && cc != c) {
                        sub_cols.push_back(cc);
                    }
                }
                if (std::min(sub_rows.size(), sub_cols.size()) <
                    static_cast<std::size_t>(needed)) {
                    continue;
                }
                const double sub_total =
                    needed == 0 ? 0.0
                                : jv_solve(submatrix(cost, sub_rows, sub_cols)).total_cost;
                if (fixed_cost + cost(r, c) + sub_total <= base.total_cost + verify_tol) {
                    chosen = c;
                    break;
                }
            }
            if (chosen < 0 && rows <= cols) {
                // numeric corner: complete from the remaining subproblem
                std::vector<int> sub_rows_incl;
                for (int rr = r; rr < rows; ++rr) sub_rows_incl.push_back(rr);
                Assignment rest = jv_solve(submatrix(cost, sub_rows_incl, remaining_cols()));
                const auto cs = remaining_cols();
                for (const auto& [sr, sc] : rest.pairs) {
                    fixed.emplace_back(sub_rows_incl[static_cast<std::size_t>(sr)],
                                       cs[static_cast<std::size_t>(sc)]);
                }
                std::sort(fixed.begin(), fixed.end());
                base.pairs = std::move(fixed);
                return;
            }
        }
        if (chosen >= 0) {
            fixed.emplace_back(r, chosen);
            col_used[static_cast<std::size_t>(chosen)] = 1;
            fixed_cost += cost(r, chosen);
        }
    }
    base.pairs = std::move(fixed);
}

} // namespace

Assignment hungarian(const Eigen::MatrixXd& cost, const HungarianOptions& opts) {
    if (cost.rows() < 1 || cost.cols() < 1) {
        throw InvalidArgument("hungarian: cost matrix must be at least 1x1");
    }
    for (Eigen::Index i = 0; i < cost.size(); ++i) {
        if (!std::isfinite(cost.data()[i])) {
            throw InvalidArgument("hungarian: cost matrix contains a non-finite entry");
        }
    }

    const bool transposed = cost.rows() > cost.cols();
    JvResult oriented =
        transposed ? jv_rows_le_cols(cost.transpose()) : jv_rows_le_cols(cost);

    Assignment out;
    out.total_cost = oriented.total;
    if (!transposed) {
        for (int i = 0; i < cost.rows(); ++i) {
            out.pairs.emplace_back(i, oriented.row_to_col[static_cast<std::size_t>(i)]);
        }
    } else {
        for (int j = 0; j < cost.cols(); ++j) {
            out.pairs.emplace_back(oriented.row_to_col[static_cast<std::size_t>(j)], j);
        }
        std::sort(out.pairs.begin(), out.pairs.end());
    }

    if (opts.lexicographic) {
        lexicographic_refine(cost, oriented, transposed, out);
    }
    return out;
}

} // namespace kgalign
