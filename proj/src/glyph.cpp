#include "glyphforge/glyph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "glyphforge/error.hpp"

namespace glyphforge {

bool is_basis_letter(char c) {
    return c == 'B' || c == 'A' || c == 'S' || c == 'Q';
}

std::span<const char> non_basis_letters() {
    static const std::array<char, 22> letters = [] {
        std::array<char, 22> out{};
        int k = 0;
        for (int i = 0; i < kLetterCount; ++i)
            if (!is_basis_letter(index_letter(i))) out[static_cast<std::size_t>(k++)] = index_letter(i);
        return out;
    }();
    return letters;
}

InkBox ink_box(const GlyphImage& g) {
    InkBox box;
    box.x0 = kGlyphSize;
    box.y0 = kGlyphSize;
    box.x1 = -1;
    box.y1 = -1;
    for (int y = 0; y < kGlyphSize; ++y) {
        for (int x = 0; x < kGlyphSize; ++x) {
            if (g.at(x, y) == 0) continue;
            box.x0 = std::min(box.x0, x);
            box.y0 = std::min(box.y0, y);
            box.x1 = std::max(box.x1, x);
            box.y1 = std::max(box.y1, y);
        }
    }
    return box;
}

long ink_mass(const GlyphImage& g) {
    long sum = 0;
    for (auto v : g.pixels) sum += v;
    return sum;
}

GlyphImage jitter(const GlyphImage& g, int dx, int dy) {
    if (std::abs(dx) > kJitterMax || std::abs(dy) > kJitterMax)
        fail(ErrorKind::invalid_argument,
             "jitter offset out of range: (" + std::to_string(dx) + "," + std::to_string(dy) + ")");
    GlyphImage out;
    for (int y = 0; y < kGlyphSize; ++y) {
        int sy = y - dy;
        if (sy < 0 || sy >= kGlyphSize) continue;
        for (int x = 0; x < kGlyphSize; ++x) {
            int sx = x - dx;
            if (sx < 0 || sx >= kGlyphSize) continue;
            out.at(x, y) = g.at(sx, sy);
        }
    }
    return out;
}

void glyph_to_unit(const GlyphImage& g, float* dst) {
    for (int i = 0; i < kGlyphPixels; ++i)
        dst[i] = static_cast<float>(g.pixels[static_cast<std::size_t>(i)]) * (1.0f / 255.0f);
}

GlyphImage unit_to_glyph(std::span<const float> unit) {
    if (unit.size() != kGlyphPixels)
        fail(ErrorKind::invalid_argument, "unit_to_glyph: expected 1296 values");
    GlyphImage g;
    for (int i = 0; i < kGlyphPixels; ++i) {
        double v = std::floor(static_cast<double>(unit[static_cast<std::size_t>(i)]) * 255.0 + 0.5);
        g.pixels[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
    return g;
}

} // namespace glyphforge
