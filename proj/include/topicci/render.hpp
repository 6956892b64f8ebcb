// render.hpp - SVG word clouds and the scores export.
#pragma once

#include "topicci/ensemble.hpp"
#include "topicci/geometry.hpp"
#include "topicci/layout.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace topicci {

/// Fill colour per quantile level; index 0 (lowest level, innermost copy)
/// is the darkest.
struct Palette {
    std::vector<std::string> colors;

    /// Single-hue blue ramp, dark to bright.
    static Palette ramp(std::size_t levels);
};

/// Standalone SVG; each copy is a centred monospace text element, painted
/// largest first. Coordinates use three fractional digits.
std::string render_cloud(std::span<const GlyphStack> stacks, const LayoutState& layout,
                         const Palette& palette);

/// Single-size cloud of a matched topic, one fill per comparison class.
std::string render_comparison(std::span<const GlyphStack> stacks,
                              const std::map<std::string, ColorClass>& classes,
                              const LayoutState& layout);

/// `replication,seed,n_iterations,score`.
std::string export_scores(std::span<const TopicModel> models);

}  // namespace topicci
