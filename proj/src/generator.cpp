#include "glyphforge/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "glyphforge/bytes.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/parallel.hpp"

namespace glyphforge {
namespace {

void glyph_to_input(const GlyphImage& g, std::vector<float>& out) {
    out.resize(kGlyphPixels);
    for (int i = 0; i < kGlyphPixels; ++i)
        out[i] = static_cast<float>(g.pixels[i]) * (1.0f / 255.0f);
}

void basis_to_inputs(const std::array<GlyphImage, 4>& basis,
                     std::vector<std::vector<float>>& inputs) {
    inputs.resize(4);
    for (int k = 0; k < 4; ++k)
        glyph_to_input(basis[k], inputs[k]);
}

void check_gen_model(const Model& m) {
    if (m.input_count() != 4)
        fail(ErrorKind::configuration,
             "generator needs a 4-input architecture, got " + std::to_string(m.input_count()));
    for (int out : m.output_nodes)
        if (m.nodes[out].out_len() != static_cast<size_t>(kGlyphPixels))
            fail(ErrorKind::configuration, "generator heads must produce 36x36 images");
}

double scaled_sse(const GlyphImage& a, const GlyphImage& b) {
    double sum = 0.0;
    for (int i = 0; i < kGlyphPixels; ++i) {
        double d = (static_cast<double>(a.pixels[i]) - b.pixels[i]) * (1.0 / 255.0);
        sum += d * d;
    }
    return sum;
}

// Validation SSE on [0,1]-scaled network outputs (before de-scaling).
void eval_val_sse(const Model& m, const Atlas& val, const std::vector<int>& letters,
                  std::vector<double>& per_letter, double& mean) {
    size_t heads = letters.size();
    std::vector<double> sums(val.fonts.size() * heads);
    parallel_for(val.fonts.size(), [&](size_t f) {
        const FontRecord& font = val.fonts[f];
        std::vector<std::vector<float>> inputs;
        basis_to_inputs(font.basis(), inputs);
        Activations acts;
        forward(m, inputs, acts);
        for (size_t h = 0; h < heads; ++h) {
            const std::vector<float>& out = acts.value[m.output_nodes[h]];
            const GlyphImage& truth = font.glyphs[letters[h]];
            double sum = 0.0;
            for (int i = 0; i < kGlyphPixels; ++i) {
                double d = out[i] - static_cast<double>(truth.pixels[i]) / 255.0;
                sum += d * d;
            }
            sums[f * heads + h] = sum;
        }
    });
    per_letter.assign(heads, 0.0);
    for (size_t f = 0; f < val.fonts.size(); ++f)
        for (size_t h = 0; h < heads; ++h)
            per_letter[h] += sums[f * heads + h];
    mean = 0.0;
    for (size_t h = 0; h < heads; ++h) {
        per_letter[h] /= static_cast<double>(val.fonts.size());
        mean += per_letter[h];
    }
    mean /= static_cast<double>(heads);
}

// Head biases start at the logit of the train-set mean glyph, so training
// fits style deviations instead of climbing from black and the first large
// steps cannot knock the trunk into dead-relu territory. Only the first
// patch layer under each head is seeded; the rest keep zero biases.
void seed_output_biases(Model& m, const Atlas& atlas, const std::vector<int>& letters) {
    for (size_t h = 0; h < letters.size(); ++h) {
        size_t idx = m.output_nodes[h];
        while (m.nodes[idx].kind != NodeKind::local_patch)
            idx = m.nodes[idx].inputs[0];
        const Node& node = m.nodes[idx];
        int p = node.patch;
        int grid = kGlyphSize / p;
        std::vector<double> mean(kGlyphPixels, 0.0);
        for (const FontRecord& font : atlas.fonts) {
            const GlyphImage& g = font.glyphs[letters[h]];
            for (int i = 0; i < kGlyphPixels; ++i)
                mean[i] += static_cast<double>(g.pixels[i]) / 255.0;
        }
        for (int y = 0; y < kGlyphSize; ++y) {
            for (int x = 0; x < kGlyphSize; ++x) {
                double v = mean[static_cast<size_t>(y) * kGlyphSize + x] /
                           static_cast<double>(atlas.fonts.size());
                v = std::clamp(v, 0.01, 0.99);
                int pi = (y / p) * grid + x / p;
                int pp = (y % p) * p + x % p;
                size_t row = static_cast<size_t>(pi) * p * p + static_cast<size_t>(pp);
                m.weights[node.b_off + row] = static_cast<float>(std::log(v / (1.0 - v)));
            }
        }
    }
}

} // namespace

Model build_single_gen(char letter, const ArchDescriptor& desc) {
    if (letter < 'A' || letter > 'Z')
        fail(ErrorKind::invalid_argument, "letter must be A-Z");
    if (is_basis_letter(letter))
        fail(ErrorKind::invalid_argument,
             std::string("letter '") + letter + "' is part of the basis set");
    ArchDescriptor d = desc;
    d.letter = letter;
    if (d.heads != 1)
        fail(ErrorKind::configuration, "single-letter generator needs heads=1");
    Model m = build_model<float>(d);
    check_gen_model(m);
    return m;
}

Model build_multi_gen(const ArchDescriptor& desc) {
    ArchDescriptor d = desc;
    d.letter = 0;
    if (d.heads != kLetterCount)
        fail(ErrorKind::configuration, "multi-letter generator needs heads=26");
    Model m = build_model<float>(d);
    check_gen_model(m);
    return m;
}

std::vector<int> generator_target_letters(const Model& m) {
    ArchDescriptor desc = parse_descriptor(m.descriptor);
    if (desc.heads == kLetterCount) {
        std::vector<int> letters(kLetterCount);
        for (int i = 0; i < kLetterCount; ++i)
            letters[i] = i;
        return letters;
    }
    if (desc.heads == 1) {
        if (desc.letter == 0)
            fail(ErrorKind::configuration,
                 "single-head generator descriptor lacks a letter= tag");
        return {letter_index(desc.letter)};
    }
    fail(ErrorKind::configuration,
         "generator must have 1 or 26 heads, got " + std::to_string(desc.heads));
}

Model train_generator(const ArchDescriptor& desc, const Atlas& train_atlas,
                      const Atlas& val_atlas, const TrainOptions& opt,
                      std::vector<GenEpochStat>* log) {
    if (train_atlas.fonts.empty() || val_atlas.fonts.empty())
        fail(ErrorKind::empty_corpus, "training and validation atlases must be nonempty");

    Model m = desc.heads == 1 ? build_single_gen(desc.letter ? desc.letter : 'R', desc)
                              : build_multi_gen(desc);
    std::vector<int> letters = generator_target_letters(m);
    init_weights(m, opt.seed);
    seed_output_biases(m, train_atlas, letters);

    OptimizerState state;
    state.learning_rate = opt.learning_rate;
    state.momentum = opt.momentum;

    Rng epoch_rng(mix64(opt.seed ^ 0x747261696e67656eull));
    std::vector<size_t> order(train_atlas.fonts.size());
    for (size_t i = 0; i < order.size(); ++i)
        order[i] = i;

    std::vector<float> batch_grads;
    std::vector<double> example_loss(order.size());
    std::vector<float> best_weights = m.weights;
    double best_val = -1.0;
    int stale_epochs = 0;
    long long step = 0;

    for (int epoch = 1; epoch <= opt.max_epochs; ++epoch) {
        Rng shuffler = epoch_rng.fork(static_cast<uint64_t>(epoch));
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffler.below(i)]);

        for (size_t begin = 0; begin < order.size();
             begin += static_cast<size_t>(opt.batch_size)) {
            size_t count = std::min(static_cast<size_t>(opt.batch_size), order.size() - begin);
            float inv = 1.0f / static_cast<float>(count);
            accumulate_example_grads(
                count, m.weights.size(),
                [&](size_t k, std::vector<float>& grads) {
                    const FontRecord& font = train_atlas.fonts[order[begin + k]];
                    std::vector<std::vector<float>> inputs;
                    basis_to_inputs(font.basis(), inputs);
                    Activations acts;
                    forward(m, inputs, acts);
                    double loss = 0.0;
                    std::vector<std::vector<float>> out_grads(letters.size());
                    for (size_t h = 0; h < letters.size(); ++h) {
                        const std::vector<float>& out = acts.value[m.output_nodes[h]];
                        const GlyphImage& truth = font.glyphs[letters[h]];
                        out_grads[h].resize(kGlyphPixels);
                        for (int i = 0; i < kGlyphPixels; ++i) {
                            float t = static_cast<float>(truth.pixels[i]) * (1.0f / 255.0f);
                            float d = out[i] - t;
                            loss += static_cast<double>(d) * d;
                            out_grads[h][i] = 2.0f * d;
                        }
                    }
                    example_loss[begin + k] = loss;
                    backward(m, acts, out_grads, grads);
                },
                batch_grads);
            for (float& g : batch_grads)
                g *= inv;
            sgd_momentum_step(m.weights, batch_grads, state, step++);
        }

        double train_loss = 0.0;
        for (size_t i = 0; i < order.size(); ++i)
            train_loss += example_loss[i];
        train_loss /= static_cast<double>(order.size());
        if (!std::isfinite(train_loss))
            fail(ErrorKind::training_divergence,
                 "non-finite training loss at epoch " + std::to_string(epoch));

        GenEpochStat stat;
        stat.epoch = epoch;
        stat.train_loss = train_loss;
        eval_val_sse(m, val_atlas, letters, stat.per_letter_sse, stat.val_mean_sse);
        if (log)
            log->push_back(stat);

        if (best_val < 0.0 || stat.val_mean_sse < best_val) {
            best_val = stat.val_mean_sse;
            best_weights = m.weights;
            stale_epochs = 0;
        } else if (++stale_epochs >= opt.patience) {
            break;
        }
    }

    m.weights = std::move(best_weights);
    return m;
}

void write_gen_metric_csv(const std::string& path, const Model& m,
                          const std::vector<GenEpochStat>& stats) {
    std::vector<int> letters = generator_target_letters(m);
    std::string text = "epoch,train_loss,val_mean_sse";
    for (int letter : letters) {
        text += ",sse_";
        text += index_letter(letter);
    }
    text += '\n';
    char buf[64];
    for (const GenEpochStat& s : stats) {
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g", s.epoch, s.train_loss, s.val_mean_sse);
        text += buf;
        for (double v : s.per_letter_sse) {
            std::snprintf(buf, sizeof buf, ",%.9g", v);
            text += buf;
        }
        text += '\n';
    }
    write_text_file(path, text);
}

GeneratedFont generate_from_basis(const Model& m, const std::array<GlyphImage, 4>& basis,
                                  const std::string& name, const FontRecord* truth) {
    check_gen_model(m);
    std::vector<int> letters = generator_target_letters(m);
    if (letters.size() != kLetterCount)
        fail(ErrorKind::configuration, "generate_all needs a 26-head generator");

    std::vector<std::vector<float>> inputs;
    basis_to_inputs(basis, inputs);
    Activations acts;
    forward(m, inputs, acts);

    GeneratedFont out;
    out.source_name = name;
    out.sse.fill(-1.0);
    out.has_truth = truth != nullptr;
    for (int h = 0; h < kLetterCount; ++h) {
        out.glyphs[h] = unit_to_glyph(acts.value[m.output_nodes[h]]);
        if (truth)
            out.sse[h] = scaled_sse(out.glyphs[h], truth->glyphs[h]);
    }
    return out;
}

GeneratedFont generate_all(const Model& m, const FontRecord& source) {
    return generate_from_basis(m, source.basis(), source.name, &source);
}

GlyphImage generate_letter(const Model& m, const std::array<GlyphImage, 4>& basis) {
    check_gen_model(m);
    if (m.head_count() != 1)
        fail(ErrorKind::configuration, "generate_letter needs a single-head generator");
    std::vector<std::vector<float>> inputs;
    basis_to_inputs(basis, inputs);
    Activations acts;
    forward(m, inputs, acts);
    return unit_to_glyph(acts.value[m.output_nodes[0]]);
}

GeneratedFont combine_fonts(const Model& m, const FontRecord& font_a, const FontRecord& font_b) {
    std::array<GlyphImage, 4> basis;
    basis[0] = font_a.glyph('B');
    basis[1] = font_a.glyph('A');
    basis[2] = font_b.glyph('S');
    basis[3] = font_b.glyph('Q');
    return generate_from_basis(m, basis, font_a.name + " + " + font_b.name, nullptr);
}

std::array<GlyphImage, kLetterCount> mean_glyphs(const Atlas& atlas) {
    if (atlas.fonts.empty())
        fail(ErrorKind::empty_corpus, "cannot average an empty atlas");
    std::array<GlyphImage, kLetterCount> out;
    std::vector<float> mean(kGlyphPixels);
    for (int letter = 0; letter < kLetterCount; ++letter) {
        for (int i = 0; i < kGlyphPixels; ++i) {
            double sum = 0.0;
            for (const FontRecord& font : atlas.fonts)
                sum += font.glyphs[letter].pixels[i];
            mean[i] = static_cast<float>(sum / (255.0 * static_cast<double>(atlas.fonts.size())));
        }
        out[letter] = unit_to_glyph(mean);
    }
    return out;
}

} // namespace glyphforge
