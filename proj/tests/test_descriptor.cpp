#include "doctest.h"

#include "glyphforge/descriptor.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/model.hpp"

using namespace glyphforge;

namespace {

long long total_params(const ArchDescriptor& d) {
    Model m = build_model<float>(d);
    long long total = 0;
    for (const Node& n : m.nodes)
        total += static_cast<long long>(n.w_len + n.b_len);
    return total;
}

} // namespace

TEST_CASE("descriptor text round trips through canonical form") {
    const char* samples[] = {
        "towers=fc(50),relu;agg=fc(250),relu,fc(200),relu;out=fc(1),logistic",
        "in=4;heads=2;towers=fc(10),relu;agg=fc(20),relu;out=fc(30),relu,patchout(3+4,36x36),logistic",
        "towers=paths[(conv(3x3,8),relu,pool(2))|(conv(4x4,8),relu,pool(2))];agg=fc(50),relu;out=fc(1),logistic",
    };
    for (const char* text : samples) {
        ArchDescriptor d = parse_descriptor(text);
        std::string canon = d.canonical();
        ArchDescriptor d2 = parse_descriptor(canon);
        CHECK(canon == d2.canonical());
    }
}

TEST_CASE("descriptor grammar rejects malformed text") {
    const char* bad[] = {
        "",
        "towers=fc(50)",                                    // missing agg/out
        "towers=fc(0),relu;agg=fc(1),relu;out=fc(1)",       // zero units
        "towers=fc(5(,relu;agg=fc(1);out=fc(1)",            // bad parens
        "towers=dense(5);agg=fc(1),relu;out=fc(1)",         // unknown op
        "in=0;towers=fc(5),relu;agg=fc(1),relu;out=fc(1)",  // zero inputs
        "letter=5;towers=fc(5),relu;agg=fc(1),relu;out=fc(1)",
        "towers=fc(5),relu;agg=fc(1),relu;out=patchout(5,36x36)",  // 36%5 != 0
        "towers=fc(5),relu;towers=fc(5),relu;agg=fc(1),relu;out=fc(1)",
    };
    for (const char* text : bad)
        CHECK_THROWS_AS(parse_descriptor(text), Error);
}

TEST_CASE("preset names resolve and others are rejected") {
    auto names = preset_arch_names();
    CHECK(names.size() == 9);
    for (const auto& n : names) {
        CHECK(is_preset_arch(n));
        CHECK_NOTHROW(resolve_arch(n));
    }
    CHECK_FALSE(is_preset_arch("net8"));
    CHECK_THROWS_AS(preset_descriptor("net8"), Error);
}

TEST_CASE("discriminator presets expose five towers and one probability") {
    for (int k = 1; k <= 7; ++k) {
        ArchDescriptor d = resolve_arch("net" + std::to_string(k));
        CHECK(d.inputs == 5);
        CHECK(d.heads == 1);
        Model m = build_model<float>(d);
        REQUIRE(m.output_nodes.size() == 1);
        CHECK(m.nodes[m.output_nodes[0]].out_len() == 1);
    }
}

TEST_CASE("generator presets expose four towers and image heads") {
    ArchDescriptor s = resolve_arch("gen-single");
    CHECK(s.inputs == 4);
    CHECK(s.heads == 1);
    ArchDescriptor mdesc = resolve_arch("gen-multi");
    CHECK(mdesc.inputs == 4);
    CHECK(mdesc.heads == 26);
    Model m = build_model<float>(mdesc);
    REQUIRE(m.output_nodes.size() == 26);
    for (size_t h : m.output_nodes)
        CHECK(m.nodes[h].out_len() == static_cast<size_t>(kGlyphPixels));
}

TEST_CASE("preset parameter totals are frozen") {
    // Totals audited by hand from the layer shapes; a change here means the
    // preset topologies moved.
    struct Expect {
        const char* name;
        long long params;
    } table[] = {
        {"net1", 437401},  {"net2", 462901},     {"net3", 925151},
        {"net4", 777151},  {"net5", 205571},     {"net6", 210671},
        {"net7", 46471},   {"gen-single", 697602}, {"gen-multi", 9141402},
    };
    for (const auto& e : table)
        CHECK(total_params(resolve_arch(e.name)) == e.params);
}

TEST_CASE("fully connected presets sit within one percent of the published totals") {
    struct Expect {
        const char* name;
        long long reference;
    } table[] = {
        {"net1", 437602}, {"net2", 463102}, {"net3", 925352}, {"net4", 777202},
    };
    for (const auto& e : table) {
        CHECK(preset_reference_params(e.name) == e.reference);
        double dev = std::abs(static_cast<double>(total_params(resolve_arch(e.name)) - e.reference)) /
                     static_cast<double>(e.reference);
        CHECK(dev <= 0.01);
    }
}

TEST_CASE("convolutional presets sit within twenty percent of the published totals") {
    struct Expect {
        const char* name;
        long long reference;
    } table[] = {{"net5", 216952}, {"net6", 222052}, {"net7", 52612}};
    for (const auto& e : table) {
        CHECK(preset_reference_params(e.name) == e.reference);
        double dev = std::abs(static_cast<double>(total_params(resolve_arch(e.name)) - e.reference)) /
                     static_cast<double>(e.reference);
        CHECK(dev <= 0.20);
    }
}

TEST_CASE("width_scaled shrinks parameter counts for checking") {
    ArchDescriptor d = resolve_arch("net1");
    ArchDescriptor shrunk = width_scaled(d, 0.02);
    CHECK(total_params(shrunk) < total_params(d) / 100);
    CHECK(total_params(shrunk) > 0);
}

TEST_CASE("resolve_arch accepts literal descriptor text") {
    ArchDescriptor d = resolve_arch("towers=fc(4),relu;agg=fc(3),relu;out=fc(1),logistic");
    CHECK(d.towers.size() == 2);
    CHECK(total_params(d) > 0);
}
