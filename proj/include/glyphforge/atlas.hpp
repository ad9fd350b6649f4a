#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/glyph.hpp"

namespace glyphforge {

// A named font's 26 normalized capital glyphs, A..Z.
struct FontRecord {
    std::string name;
    std::string family_key;
    std::array<GlyphImage, kLetterCount> glyphs;

    const GlyphImage& glyph(char letter) const { return glyphs[static_cast<std::size_t>(letter_index(letter))]; }
    std::array<GlyphImage, 4> basis() const;
};

struct SourceEntry {
    std::string path;
    int face_index = 0;
};

struct Atlas {
    std::vector<FontRecord> fonts;
    // Provenance only; not serialized (the on-disk format carries fonts alone).
    std::vector<SourceEntry> source_manifest;

    const FontRecord* find(std::string_view name) const;
    std::vector<std::string> family_keys() const; // distinct, sorted
};

struct CorpusSplit {
    Atlas train;
    Atlas test;
    std::uint64_t seed = 0;
};

// Normalized family identifier: lowercase, alphanumerics only, trailing
// style tokens removed (kept whole if stripping would empty the name).
std::string family_key(std::string_view font_name);

// Throws on any FontRecord invariant violation (used by corpus audits).
void check_record_invariants(const FontRecord& rec);

// Atlas file: magic "FGATLAS1", u16 version (=1), u32 font count; per font
// u16 name length + name, u16 key length + key, then 26 glyphs of 1296 raw
// bytes each, A..Z, rows top to bottom.
void save_atlas(const Atlas& atlas, const std::filesystem::path& path);
Atlas load_atlas(const std::filesystem::path& path);

bool structurally_equal(const Atlas& a, const Atlas& b); // fonts only

// Shuffles families with the seeded generator and assigns the first
// test_family_count of them (every font they contain) to the test side.
CorpusSplit split_corpus(const Atlas& atlas, int test_family_count, std::uint64_t seed);

} // namespace glyphforge
