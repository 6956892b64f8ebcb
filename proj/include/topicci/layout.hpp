// layout.hpp - Threshold Accepting placement of glyph stacks on a square
// canvas.
//
// Only the outermost (largest) copy of each stack takes part in collision
// and containment tests; inner copies are nested inside it. All objective
// terms are measured in reference units in which the canvas side is 1000,
// so the default weights do not depend on the canvas size.
#pragma once

#include "topicci/geometry.hpp"
#include "topicci/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace topicci {

struct Placement {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    bool rotated = false;  // 90 degrees: width and height swap

    bool operator==(const Placement& o) const { return center == o.center && rotated == o.rotated; }
};

struct LayoutState {
    std::vector<Placement> placements;
    double canvas_side = 1000.0;
};

struct ObjectiveWeights {
    double overlap = 1e3;
    double outside = 1e6;
    double centrality = 1.0;
    double circularity = 0.1;
};

struct ObjectiveTerms {
    double overlap = 0.0;      // summed pairwise intersection area
    double outside = 0.0;      // summed box area beyond the canvas
    double centrality = 0.0;   // sum_i weight_i * |center_i - canvas center|
    double circularity = 0.0;  // variance of the silhouette radius over angular sectors
    double total = 0.0;

    bool feasible() const noexcept { return overlap == 0.0 && outside == 0.0; }
};

struct TaSchedule {
    long n_steps = 1'000'000;
    /// Nonincreasing, ending at 0; each entry covers an equal share of the
    /// steps. Empty = derive from sampled move deltas.
    std::vector<double> thresholds;
    std::uint64_t seed = 0;
    int n_rounds = 100;       // rounds for the derived schedule
    int n_delta_samples = 1000;

    void validate() const;
};

struct LayoutResult {
    LayoutState state;
    ObjectiveTerms terms;
    bool feasible = false;
    std::vector<double> thresholds;  // schedule actually used
};

/// Outer-box extents (width, height) of a stack under a placement.
Eigen::Vector2d outer_extent(const GlyphStack& stack, const Placement& p);

/// Intersection area of two axis-aligned boxes given centers and extents.
double overlap_area(const Eigen::Vector2d& c1, const Eigen::Vector2d& e1, const Eigen::Vector2d& c2,
                    const Eigen::Vector2d& e2);

ObjectiveTerms objective_terms(const LayoutState& state, std::span<const GlyphStack> stacks,
                               std::span<const double> weights,
                               const ObjectiveWeights& w = {});

inline double objective(const LayoutState& state, std::span<const GlyphStack> stacks,
                        std::span<const double> weights, const ObjectiveWeights& w = {}) {
    return objective_terms(state, stacks, weights, w).total;
}

/// One random neighbour: shift one or two stacks by up to 5% of the canvas
/// side, swap two placements, or toggle one rotation.
LayoutState propose_move(const LayoutState& state, Rng& rng);

/// Heaviest stack at the centre, the rest along an Archimedean spiral in
/// weight order at the first collision-free in-canvas point.
LayoutState spiral_initial_state(std::span<const GlyphStack> stacks, std::span<const double> weights,
                                 double canvas_side);

/// Thresholds from the absolute objective change of sampled moves around
/// `state`: quantile level falls linearly from 0.8 to 0, last entry is 0.
std::vector<double> derive_thresholds(const LayoutState& state, std::span<const GlyphStack> stacks,
                                      std::span<const double> weights, const TaSchedule& schedule,
                                      const ObjectiveWeights& w = {});

using StepObserver = std::function<void(long step, double current_objective)>;

/// Threshold Accepting from the spiral start. Returns the best feasible
/// state seen, or the best state overall with feasible = false.
LayoutResult optimize(std::span<const GlyphStack> stacks, std::span<const double> weights,
                      double canvas_side, const TaSchedule& schedule,
                      const ObjectiveWeights& w = {}, const StepObserver& observer = {});

/// Same search from a caller-provided start state.
LayoutResult optimize_from(LayoutState start, std::span<const GlyphStack> stacks,
                           std::span<const double> weights, const TaSchedule& schedule,
                           const ObjectiveWeights& w = {}, const StepObserver& observer = {});

/// `word,center_x,center_y,rotation` debug dump.
std::string layout_csv(std::span<const GlyphStack> stacks, const LayoutState& state);

}  // namespace topicci
