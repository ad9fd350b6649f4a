#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace glyphforge {

inline constexpr int kGlyphSize = 36;
inline constexpr int kGlyphPixels = kGlyphSize * kGlyphSize;
inline constexpr int kLetterCount = 26;
inline constexpr int kJitterMax = 2;

// The four letters style is inferred from, in their fixed input order.
inline constexpr std::array<char, 4> kBasisLetters = {'B', 'A', 'S', 'Q'};

constexpr int letter_index(char c) { return c - 'A'; }
constexpr char index_letter(int i) { return static_cast<char>('A' + i); }
bool is_basis_letter(char c);

// The 22 letters outside the basis set, in A..Z order.
std::span<const char> non_basis_letters();

// 36x36 grid of ink intensities, row-major, top row first.
// 0 = background, 255 = full ink.
struct GlyphImage {
    std::array<std::uint8_t, kGlyphPixels> pixels{};

    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * kGlyphSize + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * kGlyphSize + x]; }

    bool operator==(const GlyphImage&) const = default;
};

// Inclusive bounding box of nonzero pixels.
struct InkBox {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;
    bool empty() const { return x1 < x0 || y1 < y0; }
    int width() const { return empty() ? 0 : x1 - x0 + 1; }
    int height() const { return empty() ? 0 : y1 - y0 + 1; }
};

InkBox ink_box(const GlyphImage& g);
long ink_mass(const GlyphImage& g);

// Translate ink by (dx, dy); vacated pixels become 0 and pixels shifted out
// of frame are dropped. |dx|, |dy| must be <= 2.
GlyphImage jitter(const GlyphImage& g, int dx, int dy);

// Pixel scaling at the network boundary.
void glyph_to_unit(const GlyphImage& g, float* dst);
GlyphImage unit_to_glyph(std::span<const float> unit); // round half up, clamped

} // namespace glyphforge
