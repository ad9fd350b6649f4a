#pragma once

#include <functional>
#include <string>
#include <vector>

#include "glyphforge/atlas.hpp"
#include "glyphforge/discriminator.hpp"
#include "glyphforge/generator.hpp"

namespace glyphforge {

// Summed squared error over [0,1]-scaled pixels.
double sse(const GlyphImage& a, const GlyphImage& b);

enum class Protocol {
    orig_basis_synth_test = 0,
    synth_basis_orig_test = 1,
    synth_basis_synth_test = 2,
    baseline = 3,
};

const char* protocol_name(Protocol p);

struct DecisionRecord {
    std::string font;
    char letter = 'A';
    Protocol protocol = Protocol::baseline;
    bool judged_same = false;
};

struct EvalRow {
    char letter = 'A';
    double sse_mean = 0.0;
    double orig_synth = 0.0;
    double synth_orig = 0.0;
    double synth_synth = 0.0;
    double baseline = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows; // 22 non-basis letters, A..Z order
    EvalRow average;           // letter '*'
    std::vector<DecisionRecord> decisions;
};

// Produces a full 26-glyph synthesis for a test font.  Swapping in a
// ground-truth passthrough here turns every synthetic protocol into the
// baseline, which the wiring tests exploit.
using GenFn = std::function<GeneratedFont(const FontRecord&)>;

GenFn model_generator(const Model& gen);
GenFn ground_truth_generator();

// Runs all four same-font protocols over the 22 non-basis letters of every
// test font and logs each individual decision.
EvalReport evaluate_protocols(const EnsembleModel& disc, const GenFn& gen, const Atlas& test);

void write_eval_csv(const std::string& path, const EvalReport& report);
void write_decision_csv(const std::string& path, const EvalReport& report);

struct HomogeneitySource {
    std::string name;
    std::string family_key;
    std::array<GlyphImage, kLetterCount> glyphs;
};

std::vector<HomogeneitySource> homogeneity_source_from_atlas(const Atlas& atlas);
std::vector<HomogeneitySource> homogeneity_source_generated(const Model& gen, const Atlas& atlas);

struct HomogeneityResult {
    long long n_pairs = 0;
    double detection_rate = 0.0; // fraction of cross-font pairs judged different
    std::string mode;            // "synthetic" or "original"
};

// Draws n_pairs (basis font, different-family candidate font, letter)
// triples and reports how often the ensemble says "different".
HomogeneityResult homogeneity_test(const EnsembleModel& disc,
                                   const std::vector<HomogeneitySource>& fonts,
                                   long long n_pairs, uint64_t seed, const std::string& mode);

} // namespace glyphforge
