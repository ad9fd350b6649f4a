#pragma once

#include <algorithm>
#include <string>

#include "glyphforge/atlas.hpp"
#include "glyphforge/discriminator.hpp"
#include "glyphforge/rng.hpp"

namespace gftest {

// Ignores its input and answers with logistic(bias); bias > 0 votes "same".
inline glyphforge::Model rigged_judge(float bias) {
    using namespace glyphforge;
    Model m = build_model<float>("towers=fc(1);agg=fc(1);out=fc(1),logistic");
    std::fill(m.weights.begin(), m.weights.end(), 0.0f);
    for (const Node& n : m.nodes)
        if (n.name == "head0/fc1")
            m.weights[n.b_off] = bias;
    return m;
}

// A record that satisfies every invariant: each glyph's ink box spans the
// full 36 pixels in one dimension.
inline glyphforge::FontRecord valid_record(const std::string& name, uint64_t seed) {
    glyphforge::FontRecord rec;
    rec.name = name;
    rec.family_key = glyphforge::family_key(name);
    glyphforge::Rng rng(seed);
    for (auto& g : rec.glyphs) {
        for (auto& p : g.pixels)
            p = static_cast<std::uint8_t>(rng.below(200));
        g.at(0, 0) = 255;
        g.at(glyphforge::kGlyphSize - 1, glyphforge::kGlyphSize - 1) = 255;
    }
    return rec;
}

inline glyphforge::Atlas small_atlas(int families, int faces_per_family) {
    static const char* suffixes[] = {"", "-Bold", "-Light", "-Black"};
    glyphforge::Atlas atlas;
    for (int f = 0; f < families; ++f) {
        std::string base = "Fam" + std::to_string(f);
        for (int v = 0; v < faces_per_family; ++v) {
            std::string name = base + suffixes[v];
            atlas.fonts.push_back(valid_record(name, static_cast<uint64_t>(f * 31 + v)));
        }
    }
    return atlas;
}

} // namespace gftest
