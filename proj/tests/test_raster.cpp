#include "doctest.h"

#include <filesystem>
#include <set>

#include "glyphforge/atlas.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/raster.hpp"
#include "glyphforge/ttf.hpp"

using namespace glyphforge;

namespace {

const std::filesystem::path kFonts = std::filesystem::path(GLYPHFORGE_FIXTURE_DIR) / "fonts";

GlyphOutline unit_square(float size) {
    GlyphOutline o;
    Contour c;
    c.push_back({0, 0, true});
    c.push_back({size, 0, true});
    c.push_back({size, size, true});
    c.push_back({0, size, true});
    o.contours.push_back(c);
    return o;
}

} // namespace

TEST_CASE("rasterizing a filled square gives solid interior coverage") {
    RasterImage img = rasterize_outline(unit_square(100.0f), 0.2f); // 20px square
    InkBox box = raster_ink_box(img);
    CHECK(box.width() >= 19);
    CHECK(box.width() <= 21);
    CHECK(box.height() >= 19);
    CHECK(box.height() <= 21);
    int cx = (box.x0 + box.x1) / 2;
    int cy = (box.y0 + box.y1) / 2;
    CHECK(img.at(cx, cy) == 255);
}

TEST_CASE("coverage is winding-sign independent for same-direction overlap") {
    GlyphOutline two = unit_square(100.0f);
    two.contours.push_back(two.contours[0]); // identical overlapping contour
    RasterImage a = rasterize_outline(unit_square(100.0f), 0.2f);
    RasterImage b = rasterize_outline(two, 0.2f);
    REQUIRE(a.pixels.size() == b.pixels.size());
    CHECK(a.pixels == b.pixels); // |accum| clamps, overlap adds nothing
}

TEST_CASE("scaling up doubles the rendered extent") {
    RasterImage small = rasterize_outline(unit_square(100.0f), 0.1f);
    RasterImage big = rasterize_outline(unit_square(100.0f), 0.2f);
    CHECK(raster_ink_box(big).width() >= raster_ink_box(small).width() * 2 - 2);
}

TEST_CASE("normalized fonts hit exactly 36 pixels in the larger dimension") {
    for (const auto& path : collect_font_files(kFonts.string())) {
        FontFace face = load_font_face(path, 0);
        FontRecord rec = rasterize_font(face);
        CHECK_NOTHROW(check_record_invariants(rec));
        int max_dim = 0;
        for (const auto& g : rec.glyphs) {
            InkBox box = ink_box(g);
            CHECK_FALSE(box.empty());
            max_dim = std::max({max_dim, box.width(), box.height()});
        }
        CHECK(max_dim == kGlyphSize);
    }
}

TEST_CASE("each glyph is centered in its frame") {
    FontFace face = load_font_face(collect_font_files(kFonts.string())[0], 0);
    FontRecord rec = rasterize_font(face);
    for (const auto& g : rec.glyphs) {
        InkBox box = ink_box(g);
        int left = box.x0;
        int right = kGlyphSize - 1 - box.x1;
        int top = box.y0;
        int bottom = kGlyphSize - 1 - box.y1;
        CHECK(std::abs(left - right) <= 1);
        CHECK(std::abs(top - bottom) <= 1);
    }
}

TEST_CASE("build_atlas dedupes names, sorts, and logs rejects") {
    auto paths = collect_font_files(kFonts.string());
    std::vector<RejectEntry> rejects;
    Atlas atlas = build_atlas(paths, &rejects);
    CHECK(atlas.fonts.size() == 8);
    CHECK(rejects.empty());
    CHECK(atlas.source_manifest.size() == atlas.fonts.size());
    for (size_t i = 1; i < atlas.fonts.size(); ++i) {
        const auto& a = atlas.fonts[i - 1];
        const auto& b = atlas.fonts[i];
        CHECK((a.family_key < b.family_key ||
               (a.family_key == b.family_key && a.name < b.name)));
    }
    std::set<std::string> names;
    for (const auto& f : atlas.fonts)
        names.insert(f.name);
    CHECK(names.size() == atlas.fonts.size());
}

TEST_CASE("build_atlas rejects unreadable files into the log") {
    auto bad = std::filesystem::path(GLYPHFORGE_FIXTURE_DIR) / "extra" / "truncated.bin";
    auto paths = collect_font_files(kFonts.string());
    paths.push_back(bad.string());
    std::vector<RejectEntry> rejects;
    Atlas atlas = build_atlas(paths, &rejects);
    CHECK(atlas.fonts.size() == 8);
    REQUIRE(rejects.size() == 1);
    CHECK(rejects[0].path == bad.string());
    CHECK_FALSE(rejects[0].reason.empty());
}

TEST_CASE("build_atlas with nothing usable raises empty_corpus") {
    std::vector<RejectEntry> rejects;
    try {
        build_atlas({}, &rejects);
        FAIL("expected empty corpus error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::empty_corpus);
    }
}
