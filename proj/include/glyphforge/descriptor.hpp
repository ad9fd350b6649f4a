#pragma once

#include <string>
#include <vector>

namespace glyphforge {

enum class LayerOp {
    fc,
    conv,
    pool,
    relu,
    logistic,
    patchout,
    paths,
};

struct LayerSpec {
    LayerOp op = LayerOp::fc;
    int units = 0;                             // fc
    int kernel = 0;                            // conv: KxK
    int channels = 0;                          // conv output channels
    int pool = 0;                              // pool window/stride
    std::vector<int> patch_sizes;              // patchout: {3} or {3,4}
    int out_h = 0, out_w = 0;                  // patchout target
    std::vector<std::vector<LayerSpec>> paths; // parallel branches
};

// Textual architecture: `towers=<layers>;agg=<layers>;out=<layers>` with
// optional leading `in=N;` (input glyph count, default 5), `heads=N;`
// (output branch count, default 1), and `letter=X;` (target letter of a
// single-output generator).  <layers> is comma-separated fc(N),
// conv(KxK,C), pool(2), relu, logistic, paths[(...)|(...)],
// patchout(P,36x36) where P is `3`, `4`, or `3+4`.
struct ArchDescriptor {
    int inputs = 5;
    int heads = 1;
    char letter = 0;
    std::vector<LayerSpec> towers;
    std::vector<LayerSpec> agg;
    std::vector<LayerSpec> out;

    std::string canonical() const;
};

// Parses descriptor text; malformed input raises a format error that names
// the character position.
ArchDescriptor parse_descriptor(const std::string& text);

// Preset names: net1..net7 (five-glyph discriminators) and gen-single /
// gen-multi (four-glyph generators).  Unknown name → invalid-argument.
bool is_preset_arch(const std::string& name);
std::string preset_descriptor(const std::string& name);
// Published reference parameter totals for net1..net7; 0 for other presets.
long long preset_reference_params(const std::string& name);
std::vector<std::string> preset_arch_names();

// Resolves a CLI --arch value: preset name or literal descriptor text.
ArchDescriptor resolve_arch(const std::string& arch);

// Shrinks fc unit counts and conv channel counts by `factor` (minimum 1)
// for affordable gradient checking; patch tiling is left untouched.
ArchDescriptor width_scaled(const ArchDescriptor& desc, double factor);

} // namespace glyphforge
