#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <set>

#include "fixture.hpp"
#include "glyphforge/atlas.hpp"
#include "glyphforge/bytes.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/rng.hpp"

using namespace glyphforge;
using gftest::small_atlas;
using gftest::valid_record;

TEST_CASE("family_key lowercases, strips punctuation and style tokens") {
    CHECK(family_key("Vexora-Bold") == "vexora");
    CHECK(family_key("Vexora Bold Italic") == "vexora");
    CHECK(family_key("Vexora") == "vexora");
    CHECK(family_key("VEXORA-CondensedLight") == "vexora");
    CHECK(family_key("Sans_3 Medium") == "sans3");
    CHECK(family_key("Bold") == "bold");           // stripping would empty it
    CHECK(family_key("BoldBold") == "bold");       // one token survives
    CHECK(family_key("Demibold") == "demi");       // greedy suffix stripping
    CHECK(family_key("Lightning") != "");          // not a suffix match
}

TEST_CASE("same family different faces share a key, other families do not") {
    CHECK(family_key("Kodera-Regular") == family_key("Kodera-BoldItalic"));
    CHECK(family_key("Kodera-Regular") != family_key("Koderb-Regular"));
}

TEST_CASE("record invariants accept a normalized record") {
    FontRecord rec = valid_record("Frame-Regular", 5);
    CHECK_NOTHROW(check_record_invariants(rec));
}

TEST_CASE("record invariants reject blank glyphs and wrong normalization") {
    FontRecord rec = valid_record("Frame-Regular", 5);
    rec.glyphs[3] = GlyphImage{};
    CHECK_THROWS_AS(check_record_invariants(rec), Error);

    rec = valid_record("Frame-Regular", 5);
    for (auto& g : rec.glyphs) {
        GlyphImage shrunk;
        for (int y = 1; y < kGlyphSize - 1; ++y)
            for (int x = 1; x < kGlyphSize - 1; ++x)
                shrunk.at(x, y) = g.at(x, y);
        shrunk.at(0, 0) = 0;
        g = shrunk;
    }
    CHECK_THROWS_AS(check_record_invariants(rec), Error);

    rec = valid_record("", 5);
    CHECK_THROWS_AS(check_record_invariants(rec), Error);
}

TEST_CASE("atlas save/load round trip is byte-identical") {
    Atlas atlas = small_atlas(3, 2);
    auto p1 = std::filesystem::temp_directory_path() / "gf_atlas_rt1.fga";
    auto p2 = std::filesystem::temp_directory_path() / "gf_atlas_rt2.fga";
    save_atlas(atlas, p1);
    Atlas loaded = load_atlas(p1);
    CHECK(structurally_equal(atlas, loaded));
    save_atlas(loaded, p2);
    CHECK(read_file_bytes(p1) == read_file_bytes(p2));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("atlas loader rejects bad magic and trailing bytes") {
    Atlas atlas = small_atlas(1, 1);
    auto p = std::filesystem::temp_directory_path() / "gf_atlas_bad.fga";
    save_atlas(atlas, p);

    auto bytes = read_file_bytes(p);
    bytes[0] = 'X';
    write_file_bytes(p, bytes);
    CHECK_THROWS_AS(load_atlas(p), Error);

    bytes = read_file_bytes(p);
    bytes[0] = 'F';
    bytes.push_back(0);
    write_file_bytes(p, bytes);
    CHECK_THROWS_AS(load_atlas(p), Error);
    std::filesystem::remove(p);
}

TEST_CASE("find locates fonts by exact name") {
    Atlas atlas = small_atlas(2, 2);
    REQUIRE(atlas.find("Fam1-Bold") != nullptr);
    CHECK(atlas.find("Fam1-Bold")->name == "Fam1-Bold");
    CHECK(atlas.find("NoSuchFont") == nullptr);
}

TEST_CASE("split_corpus separates families without overlap") {
    Atlas atlas = small_atlas(10, 2);
    CorpusSplit split = split_corpus(atlas, 3, 77);
    CHECK(split.train.fonts.size() + split.test.fonts.size() == atlas.fonts.size());

    std::set<std::string> train_keys, test_keys;
    for (const auto& f : split.train.fonts)
        train_keys.insert(f.family_key);
    for (const auto& f : split.test.fonts)
        test_keys.insert(f.family_key);
    CHECK(test_keys.size() == 3);
    for (const auto& k : test_keys)
        CHECK(train_keys.count(k) == 0);
}

TEST_CASE("split_corpus is deterministic in the seed") {
    Atlas atlas = small_atlas(8, 1);
    CorpusSplit a = split_corpus(atlas, 3, 42);
    CorpusSplit b = split_corpus(atlas, 3, 42);
    CHECK(structurally_equal(a.test, b.test));
    CorpusSplit c = split_corpus(atlas, 3, 43);
    bool same = structurally_equal(a.test, c.test);
    CHECK_FALSE(same);
}

TEST_CASE("split_corpus rejects impossible family counts") {
    Atlas atlas = small_atlas(4, 1);
    CHECK_THROWS_AS(split_corpus(atlas, 4, 1), Error);  // no train families left
    CHECK_THROWS_AS(split_corpus(atlas, 0, 1), Error);
    CHECK_THROWS_AS(split_corpus(atlas, 99, 1), Error);
}
