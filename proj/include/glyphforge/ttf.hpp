#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace glyphforge {

struct OutlinePoint {
    float x = 0.0f;
    float y = 0.0f;
    bool on_curve = true;
};

// One closed contour of quadratic outline points, in font units.
using Contour = std::vector<OutlinePoint>;

struct OutlineBounds {
    float xmin = 0.0f;
    float ymin = 0.0f;
    float xmax = 0.0f;
    float ymax = 0.0f;
    float width() const { return xmax - xmin; }
    float height() const { return ymax - ymin; }
};

struct GlyphOutline {
    std::vector<Contour> contours;

    bool empty() const;
    // Control-point bounding box; quadratic curves never leave the hull of
    // their control points, so ink always fits inside these bounds.
    OutlineBounds bounds() const;
};

// A single face of a TrueType font (glyf outlines only; CFF is rejected).
class FontFace {
  public:
    FontFace(std::vector<uint8_t> data, uint32_t face_index);

    static uint32_t count_faces(const std::vector<uint8_t>& data);

    const std::string& display_name() const { return display_name_; }
    int units_per_em() const { return units_per_em_; }

    bool has_letter(char letter) const;
    GlyphOutline letter_outline(char letter) const;

  private:
    uint32_t glyph_id(uint32_t codepoint) const;
    GlyphOutline glyph_outline(uint32_t glyph_id, int depth) const;
    void append_glyph(GlyphOutline& out, uint32_t glyph_id, int depth,
                      const float m[4], float dx, float dy) const;
    bool glyph_range(uint32_t glyph_id, uint32_t& offset, uint32_t& length) const;

    std::vector<uint8_t> data_;
    uint32_t sfnt_offset_ = 0;
    uint32_t glyf_offset_ = 0, glyf_length_ = 0;
    uint32_t loca_offset_ = 0, loca_length_ = 0;
    uint32_t cmap_sub_offset_ = 0;
    uint16_t cmap_format_ = 0;
    uint16_t num_glyphs_ = 0;
    bool long_loca_ = false;
    int units_per_em_ = 0;
    std::string display_name_;
};

FontFace load_font_face(const std::string& path, uint32_t face_index);
uint32_t count_font_faces(const std::string& path);

} // namespace glyphforge
