#include "doctest.h"

#include <vector>

#include "glyphforge/glyph.hpp"

using namespace glyphforge;

TEST_CASE("letter index round trip") {
    for (int i = 0; i < kLetterCount; ++i)
        CHECK(letter_index(index_letter(i)) == i);
    CHECK(letter_index('A') == 0);
    CHECK(letter_index('Z') == 25);
}

TEST_CASE("basis set is B A S Q in order") {
    CHECK(kBasisLetters[0] == 'B');
    CHECK(kBasisLetters[1] == 'A');
    CHECK(kBasisLetters[2] == 'S');
    CHECK(kBasisLetters[3] == 'Q');
    for (char c : kBasisLetters)
        CHECK(is_basis_letter(c));
    CHECK_FALSE(is_basis_letter('R'));
}

TEST_CASE("non-basis letters are the other 22 in alphabetical order") {
    auto rest = non_basis_letters();
    REQUIRE(rest.size() == 22);
    char prev = 0;
    for (char c : rest) {
        CHECK(c > prev);
        CHECK_FALSE(is_basis_letter(c));
        prev = c;
    }
}

TEST_CASE("ink box and mass on a hand-built image") {
    GlyphImage g;
    CHECK(ink_box(g).empty());
    CHECK(ink_mass(g) == 0);
    g.at(4, 7) = 10;
    g.at(20, 30) = 200;
    InkBox box = ink_box(g);
    CHECK(box.x0 == 4);
    CHECK(box.y0 == 7);
    CHECK(box.x1 == 20);
    CHECK(box.y1 == 30);
    CHECK(box.width() == 17);
    CHECK(box.height() == 24);
    CHECK(ink_mass(g) == 210);
}

TEST_CASE("jitter translates ink and drops out-of-frame pixels") {
    GlyphImage g;
    g.at(0, 0) = 50;
    g.at(10, 10) = 99;
    GlyphImage moved = jitter(g, 2, 1);
    CHECK(moved.at(2, 1) == 50);
    CHECK(moved.at(12, 11) == 99);
    CHECK(moved.at(0, 0) == 0);
    GlyphImage off = jitter(g, -1, -1);
    CHECK(off.at(9, 9) == 99);
    CHECK(ink_mass(off) == 99); // corner pixel fell off
    CHECK(jitter(g, 0, 0) == g);
}

TEST_CASE("unit scaling round trips") {
    GlyphImage g;
    for (int i = 0; i < kGlyphPixels; ++i)
        g.pixels[i] = static_cast<std::uint8_t>(i * 7 % 256);
    std::vector<float> unit(kGlyphPixels);
    glyph_to_unit(g, unit.data());
    for (int i = 0; i < kGlyphPixels; ++i) {
        CHECK(unit[i] >= 0.0f);
        CHECK(unit[i] <= 1.0f);
    }
    CHECK(unit_to_glyph(unit) == g);
}

TEST_CASE("unit_to_glyph clamps out-of-range values") {
    std::vector<float> unit(kGlyphPixels, 0.0f);
    unit[0] = -0.5f;
    unit[1] = 1.5f;
    unit[2] = 0.5f;
    GlyphImage g = unit_to_glyph(unit);
    CHECK(g.pixels[0] == 0);
    CHECK(g.pixels[1] == 255);
    CHECK(g.pixels[2] == 128);
}
