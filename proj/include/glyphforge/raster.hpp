#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glyphforge/atlas.hpp"
#include "glyphforge/glyph.hpp"
#include "glyphforge/ttf.hpp"

namespace glyphforge {

struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels; // row-major, top-to-bottom

    uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
};

// Anti-aliased coverage rendering of a quadratic outline at a uniform scale.
// The canvas is sized from the outline's control-point bounds plus a margin,
// with the glyph's minimum corner pinned to an integer pixel boundary.
RasterImage rasterize_outline(const GlyphOutline& outline, float scale);

// Ink extent of a rendered image (any pixel > 0 counts as ink).
InkBox raster_ink_box(const RasterImage& image);

// Largest scale at which all 26 rasterized capitals fit inside 36x36,
// located by bisection to < 1e-4 relative bracket width.
float normalize_scale(const FontFace& face);

// All 26 capitals rendered at the normalized scale, each ink box centered in
// its own 36x36 frame, with name and family key filled in.
FontRecord rasterize_font(const FontFace& face);

struct RejectEntry {
    std::string path;
    uint32_t face_index = 0;
    std::string reason;
};

// Rasterizes every face of every input file.  Failures land in the reject
// log; accepted fonts come back sorted by (family_key, name) with a matching
// source manifest.  Raises an empty-corpus error if nothing survives.
Atlas build_atlas(const std::vector<std::string>& font_paths, std::vector<RejectEntry>* reject_log);

// Recursively collects font files (.ttf/.ttc/.otf) under a directory, sorted.
std::vector<std::string> collect_font_files(const std::string& dir);

} // namespace glyphforge
