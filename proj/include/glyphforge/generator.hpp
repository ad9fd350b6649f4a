#pragma once

#include <array>
#include <string>
#include <vector>

#include "glyphforge/atlas.hpp"
#include "glyphforge/model.hpp"
#include "glyphforge/train.hpp"

namespace glyphforge {

// A synthesized alphabet.  Basis positions (B,A,S,Q) hold auto-encoded
// reconstructions of the inputs; the other 22 positions hold predictions.
struct GeneratedFont {
    std::string source_name;
    std::array<GlyphImage, kLetterCount> glyphs;
    std::array<double, kLetterCount> sse{}; // vs ground truth; -1 when unknown
    bool has_truth = false;
};

// 4-input, 1-head model targeting one non-basis letter.
Model build_single_gen(char letter, const ArchDescriptor& desc);
// 4-input, 26-head model covering the whole alphabet.
Model build_multi_gen(const ArchDescriptor& desc);

struct GenEpochStat {
    int epoch = 0;
    double train_loss = 0.0;
    double val_mean_sse = 0.0;
    std::vector<double> per_letter_sse; // one entry per trained head
};

// Minibatch pixel-L2 training on unjittered glyphs; the loss of a multi-head
// model is the sum of its per-letter terms.  Returns best-validation weights.
Model train_generator(const ArchDescriptor& desc, const Atlas& train_atlas,
                      const Atlas& val_atlas, const TrainOptions& opt,
                      std::vector<GenEpochStat>* log);

void write_gen_metric_csv(const std::string& path, const Model& m,
                          const std::vector<GenEpochStat>& stats);

// Head index -> letter index mapping implied by the model descriptor.
std::vector<int> generator_target_letters(const Model& m);

GeneratedFont generate_from_basis(const Model& m, const std::array<GlyphImage, 4>& basis,
                                  const std::string& name, const FontRecord* truth);
GeneratedFont generate_all(const Model& m, const FontRecord& source);

// Single-head models: predict just the model's target letter.
GlyphImage generate_letter(const Model& m, const std::array<GlyphImage, 4>& basis);

// Mixed basis: B,A from font_a and S,Q from font_b.
GeneratedFont combine_fonts(const Model& m, const FontRecord& font_a, const FontRecord& font_b);

// Per-letter pixel means over an atlas, the constant baseline predictor.
std::array<GlyphImage, kLetterCount> mean_glyphs(const Atlas& atlas);

} // namespace glyphforge
