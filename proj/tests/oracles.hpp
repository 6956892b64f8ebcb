// oracles.hpp - independent reference computations used only by tests.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oracle {

struct Brute {
    std::vector<int> perm;
    double cost = 0.0;
};

/// Exhaustive search; the first minimum in lexicographic order wins.
inline Brute brute_force_assignment(const Eigen::MatrixXd& c) {
    const int n = static_cast<int>(c.rows());
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    Brute best{p, std::numeric_limits<double>::infinity()};
    do {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += c(i, p[static_cast<std::size_t>(i)]);
        if (s < best.cost) best = {p, s};
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

/// Plain-loop cosine similarity.
inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

/// Rectangle intersection from corner coordinates.
inline double rect_overlap(double ax0, double ay0, double ax1, double ay1, double bx0, double by0, double bx1,
                           double by1) {
    const double w = std::min(ax1, bx1) - std::max(ax0, bx0);
    const double h = std::min(ay1, by1) - std::max(ay0, by0);
    return (w > 0 && h > 0) ? w * h : 0.0;
}

}  // namespace oracle
