#pragma once

#include <string>
#include <vector>

#include "glyphforge/glyph.hpp"

namespace glyphforge {

struct SheetRow {
    std::string label;
    std::vector<GlyphImage> glyphs;
};

// Binary PGM (P5) grid of 36x36 cells with 2px separators.  Row labels go
// into header comments; rows shorter than the widest are padded with blank
// cells.  Output bytes are a pure function of the input.
std::vector<std::uint8_t> render_contact_sheet(const std::vector<SheetRow>& rows);

void write_contact_sheet(const std::string& path, const std::vector<SheetRow>& rows);

} // namespace glyphforge
