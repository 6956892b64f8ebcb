#include "topicci/render.hpp"

#include "topicci/io.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace topicci {

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string svg_open(double side) {
    const auto s = format_fixed(side, 3);
    return "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + s + "\" height=\"" + s +
           "\" viewBox=\"0 0 " + s + ' ' + s + "\">\n"
           "<rect x=\"0\" y=\"0\" width=\"" + s + "\" height=\"" + s + "\" fill=\"#ffffff\"/>\n";
}

// Text is centred with anchor-middle plus a 0.35 em baseline drop.
std::string text_element(const std::string& word, const Placement& p, double font_size,
                         const std::string& fill) {
    const auto x = format_fixed(p.center.x(), 3);
    const auto y = format_fixed(p.center.y(), 3);
    std::string out = "<text x=\"" + x + "\" y=\"" + format_fixed(p.center.y() + 0.35 * font_size, 3) +
                      "\" font-family=\"monospace\" font-size=\"" + format_fixed(font_size, 3) +
                      "\" text-anchor=\"middle\" fill=\"" + fill + '"';
    if (p.rotated) out += " transform=\"rotate(-90 " + x + ' ' + y + ")\"";
    out += '>' + xml_escape(word) + "</text>\n";
    return out;
}

}  // namespace

Palette Palette::ramp(std::size_t levels) {
    static constexpr std::array<std::array<int, 3>, 2> ends{{{8, 48, 107}, {158, 202, 225}}};
    static const std::vector<std::string> five = {"#08306b", "#08519c", "#2171b5", "#4292c6", "#6baed6"};
    if (levels == five.size()) return {five};
    Palette p;
    for (std::size_t i = 0; i < levels; ++i) {
        const double t = levels == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(levels - 1);
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                      static_cast<int>(std::lround(ends[0][0] + t * (ends[1][0] - ends[0][0]))),
                      static_cast<int>(std::lround(ends[0][1] + t * (ends[1][1] - ends[0][1]))),
                      static_cast<int>(std::lround(ends[0][2] + t * (ends[1][2] - ends[0][2]))));
        p.colors.emplace_back(buf);
    }
    return p;
}

std::string render_cloud(std::span<const GlyphStack> stacks, const LayoutState& layout,
                         const Palette& palette) {
    if (stacks.empty()) throw std::invalid_argument("nothing to render: no glyph stacks");
    if (layout.placements.size() != stacks.size())
        throw std::invalid_argument("one placement per glyph stack required");
    std::string out = svg_open(layout.canvas_side);
    for (std::size_t i = 0; i < stacks.size(); ++i) {
        for (const auto& copy : stacks[i].copies) {
            if (copy.color_rank < 0 || static_cast<std::size_t>(copy.color_rank) >= palette.colors.size())
                throw std::invalid_argument("palette has no colour for quantile level " + format_double(copy.level));
            out += text_element(stacks[i].word, layout.placements[i], copy.box.font_size,
                                palette.colors[static_cast<std::size_t>(copy.color_rank)]);
        }
    }
    out += "</svg>\n";
    return out;
}

std::string render_comparison(std::span<const GlyphStack> stacks,
                              const std::map<std::string, ColorClass>& classes,
                              const LayoutState& layout) {
    if (stacks.empty()) throw std::invalid_argument("nothing to render: no glyph stacks");
    if (layout.placements.size() != stacks.size())
        throw std::invalid_argument("one placement per glyph stack required");
    std::string out = svg_open(layout.canvas_side);
    for (std::size_t i = 0; i < stacks.size(); ++i) {
        auto it = classes.find(stacks[i].word);
        if (it == classes.end())
            throw std::invalid_argument("no comparison class for word '" + stacks[i].word + "'");
        const char* fill = it->second == ColorClass::black   ? "#000000"
                           : it->second == ColorClass::green ? "#1a9641"
                                                             : "#d7191c";
        for (const auto& copy : stacks[i].copies)
            out += text_element(stacks[i].word, layout.placements[i], copy.box.font_size, fill);
    }
    out += "</svg>\n";
    return out;
}

std::string export_scores(std::span<const TopicModel> models) {
    std::string out = "replication,seed,n_iterations,score\n";
    for (std::size_t r = 0; r < models.size(); ++r)
        out += std::to_string(r) + ',' + std::to_string(models[r].config.seed) + ',' +
               std::to_string(models[r].config.n_iterations) + ',' + format_double(models[r].score) + '\n';
    return out;
}

}  // namespace topicci
