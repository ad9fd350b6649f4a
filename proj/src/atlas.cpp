#include "glyphforge/atlas.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <set>

#include "glyphforge/bytes.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/rng.hpp"

namespace glyphforge {

namespace {

constexpr char kMagic[8] = {'F', 'G', 'A', 'T', 'L', 'A', 'S', '1'};
constexpr std::uint16_t kVersion = 1;

const std::vector<std::string>& style_tokens() {
    static const std::vector<std::string> tokens = {
        "bold", "italic", "oblique", "light", "regular", "medium", "thin",
        "black", "condensed", "extended", "book", "demi", "heavy"};
    return tokens;
}

} // namespace

std::array<GlyphImage, 4> FontRecord::basis() const {
    std::array<GlyphImage, 4> out;
    for (std::size_t i = 0; i < 4; ++i) out[i] = glyph(kBasisLetters[i]);
    return out;
}

const FontRecord* Atlas::find(std::string_view name) const {
    for (const auto& f : fonts)
        if (f.name == name) return &f;
    return nullptr;
}

std::vector<std::string> Atlas::family_keys() const {
    std::set<std::string> keys;
    for (const auto& f : fonts) keys.insert(f.family_key);
    return {keys.begin(), keys.end()};
}

std::string family_key(std::string_view font_name) {
    if (font_name.empty()) fail(ErrorKind::invalid_argument, "family_key: empty font name");
    std::string norm;
    norm.reserve(font_name.size());
    for (char c : font_name) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) norm.push_back(static_cast<char>(std::tolower(u)));
    }
    if (norm.empty()) return norm; // name had no alphanumerics; keep empty, callers reject
    std::string key = norm;
    bool stripped = true;
    while (stripped) {
        stripped = false;
        for (const auto& tok : style_tokens()) {
            if (key.size() > tok.size() && key.ends_with(tok)) {
                key.resize(key.size() - tok.size());
                stripped = true;
                break;
            }
        }
    }
    return key.empty() ? norm : key;
}

void check_record_invariants(const FontRecord& rec) {
    if (rec.name.empty()) fail(ErrorKind::invalid_argument, "font record has empty name");
    if (rec.family_key.empty()) fail(ErrorKind::invalid_argument, rec.name + ": empty family key");
    for (char c : rec.family_key) {
        unsigned char u = static_cast<unsigned char>(c);
        if (!std::isalnum(u) || std::isupper(u))
            fail(ErrorKind::invalid_argument, rec.name + ": family key not lowercase alphanumeric");
    }
    int max_dim = 0;
    for (int i = 0; i < kLetterCount; ++i) {
        const auto box = ink_box(rec.glyphs[static_cast<std::size_t>(i)]);
        if (box.empty())
            fail(ErrorKind::invalid_argument,
                 rec.name + ": blank glyph '" + std::string(1, index_letter(i)) + "'");
        max_dim = std::max({max_dim, box.width(), box.height()});
    }
    if (max_dim != kGlyphSize)
        fail(ErrorKind::invalid_argument,
             rec.name + ": max glyph dimension " + std::to_string(max_dim) + ", expected 36");
}

void save_atlas(const Atlas& atlas, const std::filesystem::path& path) {
    ByteWriter w;
    w.bytes(kMagic, sizeof kMagic);
    w.u16(kVersion);
    w.u32(static_cast<std::uint32_t>(atlas.fonts.size()));
    for (const auto& f : atlas.fonts) {
        if (f.name.size() > 0xffff || f.family_key.size() > 0xffff)
            fail(ErrorKind::invalid_argument, "font name or key too long: " + f.name);
        w.u16(static_cast<std::uint16_t>(f.name.size()));
        w.str(f.name);
        w.u16(static_cast<std::uint16_t>(f.family_key.size()));
        w.str(f.family_key);
        for (const auto& g : f.glyphs) w.bytes(g.pixels.data(), g.pixels.size());
    }
    w.save(path);
}

Atlas load_atlas(const std::filesystem::path& path) {
    ByteReader r(path);
    char magic[8];
    if (r.remaining() < sizeof magic) fail_format(0, "bad magic (file too short)");
    r.bytes(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) fail_format(0, "bad magic");
    std::size_t off = r.offset();
    std::uint16_t version = r.u16();
    if (version != kVersion) fail_format(off, "unsupported version " + std::to_string(version));
    std::uint32_t count = r.u32();
    Atlas atlas;
    atlas.fonts.reserve(count);
    std::set<std::string> names;
    for (std::uint32_t i = 0; i < count; ++i) {
        FontRecord rec;
        rec.name = r.str(r.u16());
        rec.family_key = r.str(r.u16());
        off = r.offset();
        if (r.remaining() < static_cast<std::size_t>(kLetterCount) * kGlyphPixels)
            fail_format(off, "truncated glyph block for font " + rec.name +
                                 " (glyph count would fall short of 26)");
        for (auto& g : rec.glyphs) r.bytes(g.pixels.data(), g.pixels.size());
        if (!names.insert(rec.name).second)
            fail_format(off, "duplicate font name: " + rec.name);
        atlas.fonts.push_back(std::move(rec));
    }
    if (!r.at_end()) fail_format(r.offset(), "trailing bytes after last font");
    return atlas;
}

bool structurally_equal(const Atlas& a, const Atlas& b) {
    if (a.fonts.size() != b.fonts.size()) return false;
    for (std::size_t i = 0; i < a.fonts.size(); ++i) {
        const auto& fa = a.fonts[i];
        const auto& fb = b.fonts[i];
        if (fa.name != fb.name || fa.family_key != fb.family_key || fa.glyphs != fb.glyphs)
            return false;
    }
    return true;
}

CorpusSplit split_corpus(const Atlas& atlas, int test_family_count, std::uint64_t seed) {
    if (test_family_count <= 0)
        fail(ErrorKind::invalid_argument, "test_family_count must be positive");
    std::vector<std::string> families = atlas.family_keys();
    if (families.size() <= static_cast<std::size_t>(test_family_count))
        fail(ErrorKind::invalid_argument,
             "atlas has " + std::to_string(families.size()) + " families, need more than " +
                 std::to_string(test_family_count));
    Rng rng(seed);
    // Fisher-Yates over the sorted family list.
    for (std::size_t i = families.size(); i > 1; --i) {
        std::size_t j = rng.below(i);
        std::swap(families[i - 1], families[j]);
    }
    std::set<std::string> test_keys(families.begin(),
                                    families.begin() + test_family_count);
    CorpusSplit split;
    split.seed = seed;
    for (const auto& f : atlas.fonts) {
        if (test_keys.count(f.family_key))
            split.test.fonts.push_back(f);
        else
            split.train.fonts.push_back(f);
    }
    return split;
}

} // namespace glyphforge
