// hungarian.hpp - exact square linear assignment (Kuhn-Munkres, O(n^3)).
//
// Among all optimal assignments the lexicographically smallest permutation
// is returned. The tie search walks alternating cycles inside the equality
// subgraph of the optimal dual potentials.
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace topicci {

template <typename Scalar>
struct Assignment {
    std::vector<int> permutation;  // row -> column
    Scalar total_cost{};           // sum over rows in row order
};

namespace detail {

template <typename Derived>
typename Derived::Scalar assignment_cost(const Eigen::MatrixBase<Derived>& cost,
                                         const std::vector<int>& perm) {
    typename Derived::Scalar total(0);
    for (Eigen::Index i = 0; i < cost.rows(); ++i) total += cost(i, perm[static_cast<std::size_t>(i)]);
    return total;
}

class TieSearch {
public:
    TieSearch(int n, std::vector<char> equal, std::vector<int>& perm)
        : n_(n), equal_(std::move(equal)), perm_(perm), owner_(static_cast<std::size_t>(n)) {
        for (int i = 0; i < n_; ++i) owner_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])] = i;
    }

    void minimize() {
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < perm_[static_cast<std::size_t>(i)]; ++j) {
                if (!eq(i, j) || owner(j) < i) continue;
                visited_.assign(static_cast<std::size_t>(n_), 0);
                path_.clear();
                fixed_row_ = i;
                target_ = perm_[static_cast<std::size_t>(i)];
                blocked_ = j;
                if (!augment(owner(j))) continue;
                // path_ holds (row, new column) pairs; apply, then give j to row i.
                for (auto [row, col] : path_) {
                    perm_[static_cast<std::size_t>(row)] = col;
                    owner_[static_cast<std::size_t>(col)] = row;
                }
                perm_[static_cast<std::size_t>(i)] = j;
                owner_[static_cast<std::size_t>(j)] = i;
                break;
            }
        }
    }

private:
    bool eq(int i, int j) const { return equal_[static_cast<std::size_t>(i) * n_ + j] != 0; }
    int owner(int j) const { return owner_[static_cast<std::size_t>(j)]; }

    bool augment(int row) {
        for (int c = 0; c < n_; ++c) {
            if (c == blocked_ || visited_[static_cast<std::size_t>(c)] || !eq(row, c)) continue;
            if (c != target_ && owner(c) <= fixed_row_) continue;
            visited_[static_cast<std::size_t>(c)] = 1;
            if (c == target_ || augment(owner(c))) {
                path_.emplace_back(row, c);
                return true;
            }
        }
        return false;
    }

    int n_;
    std::vector<char> equal_;
    std::vector<int>& perm_;
    std::vector<int> owner_;
    std::vector<char> visited_;
    std::vector<std::pair<int, int>> path_;
    int fixed_row_ = 0, target_ = 0, blocked_ = 0;
};

}  // namespace detail

/// Minimizes sum_k cost(k, perm[k]) over permutations. Throws on non-square
/// or non-finite input.
template <typename Derived>
Assignment<typename Derived::Scalar> hungarian(const Eigen::MatrixBase<Derived>& cost) {
    using Scalar = typename Derived::Scalar;
    if (cost.rows() != cost.cols()) throw std::invalid_argument("assignment cost matrix must be square");
    if (!cost.allFinite()) throw std::invalid_argument("assignment cost matrix has non-finite entries");
    const int n = static_cast<int>(cost.rows());
    Assignment<Scalar> result;
    if (n == 0) return result;

    // 1-based potentials; p[j] = row matched to column j, way[] = predecessor column.
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    std::vector<Scalar> u(n + 1, Scalar(0)), v(n + 1, Scalar(0));
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<Scalar> minv(n + 1);
    std::vector<char> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            Scalar delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const Scalar cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) perm[static_cast<std::size_t>(p[j] - 1)] = j - 1;
    const Scalar base_cost = detail::assignment_cost(cost, perm);

    // Equality subgraph of the optimal duals, with a tolerance scaled to the data.
    const Scalar scale = std::max(Scalar(1), cost.cwiseAbs().maxCoeff());
    const Scalar tol = Scalar(1e-9) * scale;
    std::vector<char> equal(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            equal[static_cast<std::size_t>(i) * n + j] = (cost(i, j) - u[i + 1] - v[j + 1]) <= tol;

    std::vector<int> lex = perm;
    detail::TieSearch(n, std::move(equal), lex).minimize();
    const Scalar lex_cost = detail::assignment_cost(cost, lex);
    if (lex_cost <= base_cost) {
        result.permutation = std::move(lex);
        result.total_cost = lex_cost;
    } else {
        result.permutation = std::move(perm);
        result.total_cost = base_cost;
    }
    return result;
}

}  // namespace topicci
