#include "topicci/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace topicci {

BoxSpec size_word(std::string_view word, double weight, double scale) {
    if (word.empty()) throw std::invalid_argument("cannot size an empty word");
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw std::invalid_argument("word weight must be >= 0");
    if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
    const double len = static_cast<double>(word.size());
    BoxSpec box;
    box.font_size = scale * std::sqrt(weight / len);
    box.width = kCharAspect * len * box.font_size;
    box.height = box.font_size;
    return box;
}

GlyphStack build_stack(std::string word, std::span<const double> levels,
                       std::span<const double> weights, double scale, double min_render_size) {
    if (levels.size() != weights.size())
        throw std::invalid_argument("one weight per quantile level required");
    for (std::size_t i = 1; i < weights.size(); ++i)
        if (weights[i] < weights[i - 1] || !(levels[i] > levels[i - 1]))
            throw std::invalid_argument("quantile weights must be nondecreasing in the level");
    GlyphStack stack;
    stack.word = std::move(word);
    for (std::size_t i = levels.size(); i-- > 0;) {
        const BoxSpec box = size_word(stack.word, weights[i], scale);
        if (box.font_size < min_render_size) continue;
        stack.copies.push_back({levels[i], weights[i], box, static_cast<int>(i)});
    }
    return stack;
}

}  // namespace topicci

namespace topicci {

double calibrate_scale(std::span<const std::vector<std::pair<std::string, double>>> clouds,
                       double canvas_side, double fill_ratio) {
    if (!(canvas_side > 0.0) || !(fill_ratio > 0.0 && fill_ratio <= 1.0))
        throw std::invalid_argument("canvas side must be positive and fill ratio in (0, 1]");
    double heaviest = 0.0;
    double longest_unit = 0.0;  // longest box side at scale 1
    for (const auto& cloud : clouds) {
        double sum = 0.0;
        for (const auto& [word, weight] : cloud) {
            sum += weight;
            const auto box = size_word(word, weight, 1.0);
            longest_unit = std::max({longest_unit, box.width, box.height});
        }
        heaviest = std::max(heaviest, sum);
    }
    if (!(heaviest > 0.0)) throw std::invalid_argument("cannot calibrate a scale for zero total weight");
    double scale = std::sqrt(fill_ratio * canvas_side * canvas_side / (kCharAspect * heaviest));
    if (longest_unit > 0.0) scale = std::min(scale, 0.9 * canvas_side / longest_unit);
    return scale;
}

}  // namespace topicci
