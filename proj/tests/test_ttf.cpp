#include "doctest.h"

#include <filesystem>
#include <set>
#include <string>

#include "glyphforge/atlas.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/raster.hpp"
#include "glyphforge/ttf.hpp"

using namespace glyphforge;

namespace {

const std::filesystem::path kFonts = std::filesystem::path(GLYPHFORGE_FIXTURE_DIR) / "fonts";
const std::filesystem::path kExtra = std::filesystem::path(GLYPHFORGE_FIXTURE_DIR) / "extra";

std::vector<std::string> fixture_fonts() { return collect_font_files(kFonts.string()); }

} // namespace

TEST_CASE("fixture directory carries eight font files") {
    CHECK(fixture_fonts().size() == 8);
}

TEST_CASE("every fixture face parses with name, upem and all capitals") {
    for (const auto& path : fixture_fonts()) {
        FontFace face = load_font_face(path, 0);
        CHECK_FALSE(face.display_name().empty());
        CHECK(face.units_per_em() > 0);
        for (char c = 'A'; c <= 'Z'; ++c) {
            CHECK(face.has_letter(c));
            GlyphOutline outline = face.letter_outline(c);
            CHECK_FALSE(outline.empty());
            CHECK(outline.bounds().width() > 0);
        }
    }
}

TEST_CASE("collection files expose multiple faces with distinct names") {
    std::vector<std::string> collections;
    for (const auto& e : std::filesystem::directory_iterator(kExtra))
        if (e.path().extension() == ".ttc")
            collections.push_back(e.path().string());
    REQUIRE(collections.size() == 1);
    uint32_t n = count_font_faces(collections[0]);
    CHECK(n == 2);
    std::set<std::string> names;
    for (uint32_t i = 0; i < n; ++i)
        names.insert(load_font_face(collections[0], i).display_name());
    CHECK(names.size() == n);
}

TEST_CASE("plain ttf reports one face") {
    CHECK(count_font_faces(fixture_fonts()[0]) == 1);
}

TEST_CASE("truncated file raises a format error") {
    auto bad = kExtra / "truncated.bin";
    REQUIRE(std::filesystem::exists(bad));
    CHECK_THROWS_AS(load_font_face(bad.string(), 0), Error);
}

TEST_CASE("out-of-range face index is rejected") {
    CHECK_THROWS_AS(load_font_face(fixture_fonts()[0], 5), Error);
}

TEST_CASE("a font carrying both cmap formats 4 and 12 still maps letters") {
    std::vector<std::string> extra_fonts;
    for (const auto& e : std::filesystem::directory_iterator(kExtra))
        if (e.path().extension() == ".ttf")
            extra_fonts.push_back(e.path().string());
    REQUIRE(extra_fonts.size() == 1);
    FontFace face = load_font_face(extra_fonts[0], 0);
    for (char c = 'A'; c <= 'Z'; ++c)
        CHECK(face.has_letter(c));
    CHECK_FALSE(face.has_letter('a' + 0)); // lowercase not mapped
}

TEST_CASE("composite glyphs resolve to the component outlines") {
    // One fixture family uses a component-built Q; its outline must still
    // produce ink and normalize like everything else.
    bool found_composite_family = false;
    for (const auto& path : fixture_fonts()) {
        FontFace face = load_font_face(path, 0);
        GlyphOutline q = face.letter_outline('Q');
        GlyphOutline o = face.letter_outline('O');
        if (q.contours.size() > o.contours.size()) {
            found_composite_family = true;
            CHECK(q.bounds().height() > o.bounds().height()); // tail descends
        }
    }
    CHECK(found_composite_family);
}
