// geometry.hpp - percentile weights to superimposed, area-proportional
// monospace word boxes.
#pragma once

#include <Eigen/Core>

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace topicci {

/// Monospace glyph advance over glyph height.
inline constexpr double kCharAspect = 0.6;
/// Copies with a smaller font size (canvas units) are not drawn.
inline constexpr double kMinRenderSize = 1.0;

struct BoxSpec {
    double width = 0.0;
    double height = 0.0;
    double font_size = 0.0;

    double area() const noexcept { return width * height; }
};

/// font_size = scale * sqrt(weight / len), so the box area
/// kCharAspect * len * font_size^2 equals kCharAspect * scale^2 * weight
/// whatever the word length.
BoxSpec size_word(std::string_view word, double weight, double scale);

struct GlyphCopy {
    double level = 0.0;   // quantile level this copy shows
    double weight = 0.0;
    BoxSpec box;
    int color_rank = 0;   // index of the level in the level list
};

struct GlyphStack {
    std::string word;
    std::vector<GlyphCopy> copies;  // descending level, i.e. largest box first
    Eigen::Vector2d anchor = Eigen::Vector2d::Zero();

    bool empty() const noexcept { return copies.empty(); }
    const BoxSpec& outer() const { return copies.front().box; }
};

/// One copy per level, largest first; copies below min_render_size dropped.
/// `weights` must be nondecreasing along `levels`.
GlyphStack build_stack(std::string word, std::span<const double> levels,
                       std::span<const double> weights, double scale,
                       double min_render_size = kMinRenderSize);

}  // namespace topicci

namespace topicci {

/// One scale for every copy of every word in every cloud: the heaviest
/// cloud's summed outer-box area becomes fill_ratio of the canvas, capped
/// so that no outer box is longer than 0.9 canvas side. `clouds` holds,
/// per cloud, (word, outer weight) pairs.
double calibrate_scale(std::span<const std::vector<std::pair<std::string, double>>> clouds,
                       double canvas_side, double fill_ratio);

}  // namespace topicci
