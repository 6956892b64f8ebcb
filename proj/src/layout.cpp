#include "topicci/layout.hpp"

#include "topicci/ensemble.hpp"
#include "topicci/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace topicci {

namespace {

constexpr double kReferenceSide = 1000.0;
constexpr double kMoveFraction = 0.05;
constexpr int kSectors = 16;
// tan(22.5 deg): splits each octant into two sectors.
constexpr double kHalfOctant = 0.41421356237309503;

// Wedge index from comparisons only, so it is unchanged when coordinates are
// scaled by a common factor.
int sector_of(double dx, double dy) {
    const int quadrant = (dx < 0.0 ? 1 : 0) + (dy < 0.0 ? 2 : 0);
    const double ax = std::abs(dx), ay = std::abs(dy);
    const bool x_major = ax >= ay;
    const double major = x_major ? ax : ay, minor = x_major ? ay : ax;
    const int sub = minor < kHalfOctant * major ? 0 : 1;
    return quadrant * 4 + (x_major ? 0 : 2) + sub;
}

void check_inputs(std::span<const GlyphStack> stacks, std::span<const double> weights) {
    if (stacks.empty()) throw std::invalid_argument("layout needs at least one glyph stack");
    if (weights.size() != stacks.size()) throw std::invalid_argument("one weight per glyph stack required");
    for (const auto& s : stacks)
        if (s.empty()) throw std::invalid_argument("glyph stack '" + s.word + "' has no drawable copy");
}

double outside_of(const Eigen::Vector2d& c, const Eigen::Vector2d& e, double side) {
    const double lo_x = std::max(0.0, c.x() - e.x() / 2), hi_x = std::min(side, c.x() + e.x() / 2);
    const double lo_y = std::max(0.0, c.y() - e.y() / 2), hi_y = std::min(side, c.y() + e.y() / 2);
    const double inside = std::max(0.0, hi_x - lo_x) * std::max(0.0, hi_y - lo_y);
    return std::max(0.0, e.x() * e.y() - inside);
}

}  // namespace

void TaSchedule::validate() const {
    if (n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
    if (thresholds.empty()) {
        if (n_rounds < 1) throw std::invalid_argument("n_rounds must be >= 1");
        if (n_delta_samples < 1) throw std::invalid_argument("n_delta_samples must be >= 1");
        return;
    }
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] >= 0.0)) throw std::invalid_argument("thresholds must be nonnegative");
        if (i > 0 && thresholds[i] > thresholds[i - 1])
            throw std::invalid_argument("thresholds must be nonincreasing");
    }
    if (thresholds.back() != 0.0) throw std::invalid_argument("last threshold must be 0");
}

Eigen::Vector2d outer_extent(const GlyphStack& stack, const Placement& p) {
    const auto& box = stack.outer();
    return p.rotated ? Eigen::Vector2d(box.height, box.width) : Eigen::Vector2d(box.width, box.height);
}

double overlap_area(const Eigen::Vector2d& c1, const Eigen::Vector2d& e1, const Eigen::Vector2d& c2,
                    const Eigen::Vector2d& e2) {
    const double ox = std::min(c1.x() + e1.x() / 2, c2.x() + e2.x() / 2) -
                      std::max(c1.x() - e1.x() / 2, c2.x() - e2.x() / 2);
    if (ox <= 0.0) return 0.0;
    const double oy = std::min(c1.y() + e1.y() / 2, c2.y() + e2.y() / 2) -
                      std::max(c1.y() - e1.y() / 2, c2.y() - e2.y() / 2);
    if (oy <= 0.0) return 0.0;
    return ox * oy;
}

ObjectiveTerms objective_terms(const LayoutState& state, std::span<const GlyphStack> stacks,
                               std::span<const double> weights, const ObjectiveWeights& w) {
    const std::size_t n = stacks.size();
    if (state.placements.size() != n) throw std::invalid_argument("one placement per glyph stack required");
    if (weights.size() != n) throw std::invalid_argument("one weight per glyph stack required");

    const double f = kReferenceSide / state.canvas_side;
    const Eigen::Vector2d mid(kReferenceSide / 2, kReferenceSide / 2);
    std::array<Eigen::Vector2d, 64> local_c, local_e;
    std::vector<Eigen::Vector2d> heap_c, heap_e;
    Eigen::Vector2d* cs = local_c.data();
    Eigen::Vector2d* es = local_e.data();
    if (n > local_c.size()) {
        heap_c.resize(n);
        heap_e.resize(n);
        cs = heap_c.data();
        es = heap_e.data();
    }

    ObjectiveTerms t;
    std::array<double, kSectors> radius{};
    std::array<bool, kSectors> hit{};
    for (std::size_t i = 0; i < n; ++i) {
        cs[i] = state.placements[i].center * f;
        es[i] = outer_extent(stacks[i], state.placements[i]) * f;
        t.outside += outside_of(cs[i], es[i], kReferenceSide);
        const Eigen::Vector2d d = cs[i] - mid;
        t.centrality += weights[i] * std::sqrt(d.x() * d.x() + d.y() * d.y());
        for (int corner = 0; corner < 4; ++corner) {
            const double dx = d.x() + ((corner & 1) ? es[i].x() : -es[i].x()) / 2;
            const double dy = d.y() + ((corner & 2) ? es[i].y() : -es[i].y()) / 2;
            const int s = sector_of(dx, dy);
            const double r = std::sqrt(dx * dx + dy * dy);
            if (!hit[s] || r > radius[s]) radius[s] = r;
            hit[s] = true;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) t.overlap += overlap_area(cs[i], es[i], cs[j], es[j]);

    int filled = 0;
    double mean = 0.0;
    for (int s = 0; s < kSectors; ++s)
        if (hit[s]) {
            ++filled;
            mean += radius[s];
        }
    mean /= filled;
    for (int s = 0; s < kSectors; ++s)
        if (hit[s]) t.circularity += (radius[s] - mean) * (radius[s] - mean);
    t.circularity /= filled;

    t.total = w.overlap * t.overlap + w.outside * t.outside + w.centrality * t.centrality +
              w.circularity * t.circularity;
    return t;
}

LayoutState propose_move(const LayoutState& state, Rng& rng) {
    LayoutState next = state;
    const auto n = static_cast<std::uint64_t>(state.placements.size());
    if (n == 0) return next;
    const double delta = kMoveFraction * state.canvas_side;

    // Families: 0 translate, 1 swap, 2 rotate; swap needs two stacks.
    int family = static_cast<int>(rng.below(n >= 2 ? 3 : 2));
    if (n < 2 && family == 1) family = 2;

    switch (family) {
        case 0: {
            const auto i = rng.below(n);
            next.placements[i].center += Eigen::Vector2d(rng.uniform(-delta, delta), rng.uniform(-delta, delta));
            if (n >= 2 && rng.below(2) == 1) {
                auto j = rng.below(n - 1);
                if (j >= i) ++j;
                next.placements[j].center +=
                    Eigen::Vector2d(rng.uniform(-delta, delta), rng.uniform(-delta, delta));
            }
            break;
        }
        case 1: {
            const auto i = rng.below(n);
            auto j = rng.below(n - 1);
            if (j >= i) ++j;
            std::swap(next.placements[i], next.placements[j]);
            break;
        }
        default: {
            const auto i = rng.below(n);
            next.placements[i].rotated = !next.placements[i].rotated;
            break;
        }
    }
    return next;
}

LayoutState spiral_initial_state(std::span<const GlyphStack> stacks, std::span<const double> weights,
                                 double canvas_side) {
    check_inputs(stacks, weights);
    if (!(canvas_side > 0.0)) throw std::invalid_argument("canvas side must be positive");
    const std::size_t n = stacks.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });

    LayoutState state;
    state.canvas_side = canvas_side;
    state.placements.resize(n);
    const Eigen::Vector2d mid(canvas_side / 2, canvas_side / 2);
    // Arm spacing 1% of the side; arc steps of about 0.3% of the side.
    const double arm = canvas_side * (0.01 / (2 * std::numbers::pi));
    const double max_theta = 0.75 * 2 * std::numbers::pi / 0.01;

    std::vector<std::size_t> placed;
    for (std::size_t i : order) {
        const Eigen::Vector2d ext = outer_extent(stacks[i], {});
        double best_violation = std::numeric_limits<double>::infinity();
        Eigen::Vector2d best = mid;
        for (double theta = 0.0; theta <= max_theta; theta += std::min(0.3, 2.0 / std::max(theta, 1.0))) {
            const double r = arm * theta;
            const Eigen::Vector2d c = mid + Eigen::Vector2d(r * std::cos(theta), r * std::sin(theta));
            double violation = outside_of(c, ext, canvas_side);
            for (std::size_t j : placed)
                violation += overlap_area(c, ext, state.placements[j].center,
                                          outer_extent(stacks[j], state.placements[j]));
            if (violation < best_violation) {
                best_violation = violation;
                best = c;
            }
            if (violation == 0.0) break;
        }
        state.placements[i].center = best;
        placed.push_back(i);
    }
    return state;
}

std::vector<double> derive_thresholds(const LayoutState& state, std::span<const GlyphStack> stacks,
                                      std::span<const double> weights, const TaSchedule& schedule,
                                      const ObjectiveWeights& w) {
    Rng rng(derive_seed(schedule.seed, 1));
    const double base = objective(state, stacks, weights, w);
    std::vector<double> deltas;
    for (int s = 0; s < schedule.n_delta_samples; ++s) {
        const double d = std::abs(objective(propose_move(state, rng), stacks, weights, w) - base);
        if (d > 0.0 && std::isfinite(d)) deltas.push_back(d);
    }
    std::sort(deltas.begin(), deltas.end());
    std::vector<double> thresholds(static_cast<std::size_t>(schedule.n_rounds), 0.0);
    if (deltas.empty()) return thresholds;
    const int rounds = schedule.n_rounds;
    for (int t = 0; t + 1 < rounds; ++t) {
        const double level = 0.8 * (1.0 - static_cast<double>(t) / (rounds - 1));
        thresholds[static_cast<std::size_t>(t)] = quantile_sorted(deltas, level);
    }
    return thresholds;
}

LayoutResult optimize_from(LayoutState start, std::span<const GlyphStack> stacks,
                           std::span<const double> weights, const TaSchedule& schedule,
                           const ObjectiveWeights& w, const StepObserver& observer) {
    check_inputs(stacks, weights);
    schedule.validate();
    if (start.placements.size() != stacks.size())
        throw std::invalid_argument("one placement per glyph stack required");
    const double side = start.canvas_side;
    double total_area = 0.0;
    for (const auto& s : stacks) total_area += s.outer().area();
    if (total_area > side * side)
        throw std::domain_error("canvas too small: outer boxes cover " + format_double(total_area) +
                                " > canvas area " + format_double(side * side));

    LayoutResult result;
    result.thresholds = schedule.thresholds.empty()
                            ? derive_thresholds(start, stacks, weights, schedule, w)
                            : schedule.thresholds;
    const auto& thr = result.thresholds;
    const auto rounds = static_cast<long>(thr.size());

    LayoutState current = std::move(start);
    ObjectiveTerms cur_terms = objective_terms(current, stacks, weights, w);
    LayoutState best = current, best_feasible;
    ObjectiveTerms best_terms = cur_terms, best_feasible_terms;
    bool have_feasible = cur_terms.feasible();
    if (have_feasible) {
        best_feasible = current;
        best_feasible_terms = cur_terms;
    }

    Rng rng(derive_seed(schedule.seed, 0));
    for (long step = 0; step < schedule.n_steps; ++step) {
        const long round = std::min(rounds - 1, step * rounds / std::max(1L, schedule.n_steps));
        LayoutState cand = propose_move(current, rng);
        const ObjectiveTerms cand_terms = objective_terms(cand, stacks, weights, w);
        if (cand_terms.total - cur_terms.total <= thr[static_cast<std::size_t>(round)]) {
            current = std::move(cand);
            cur_terms = cand_terms;
            if (cur_terms.total < best_terms.total) {
                best = current;
                best_terms = cur_terms;
            }
            if (cur_terms.feasible() && (!have_feasible || cur_terms.total < best_feasible_terms.total)) {
                best_feasible = current;
                best_feasible_terms = cur_terms;
                have_feasible = true;
            }
        }
        if (observer) observer(step, cur_terms.total);
    }

    result.feasible = have_feasible;
    result.state = have_feasible ? std::move(best_feasible) : std::move(best);
    result.terms = have_feasible ? best_feasible_terms : best_terms;
    return result;
}

LayoutResult optimize(std::span<const GlyphStack> stacks, std::span<const double> weights,
                      double canvas_side, const TaSchedule& schedule, const ObjectiveWeights& w,
                      const StepObserver& observer) {
    return optimize_from(spiral_initial_state(stacks, weights, canvas_side), stacks, weights, schedule, w,
                         observer);
}

std::string layout_csv(std::span<const GlyphStack> stacks, const LayoutState& state) {
    std::string out = "word,center_x,center_y,rotation\n";
    for (std::size_t i = 0; i < stacks.size(); ++i) {
        const auto& p = state.placements.at(i);
        out += stacks[i].word + ',' + format_fixed(p.center.x(), 3) + ',' + format_fixed(p.center.y(), 3) +
               ',' + (p.rotated ? "90" : "0") + '\n';
    }
    return out;
}

}  // namespace topicci
