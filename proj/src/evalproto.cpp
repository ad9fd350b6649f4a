#include "glyphforge/evalproto.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "glyphforge/bytes.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/parallel.hpp"
#include "glyphforge/rng.hpp"

namespace glyphforge {

double sse(const GlyphImage& a, const GlyphImage& b) {
    double total = 0.0;
    for (int i = 0; i < kGlyphPixels; ++i) {
        double d = (static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i])) / 255.0;
        total += d * d;
    }
    return total;
}

const char* protocol_name(Protocol p) {
    switch (p) {
    case Protocol::orig_basis_synth_test: return "orig_synth";
    case Protocol::synth_basis_orig_test: return "synth_orig";
    case Protocol::synth_basis_synth_test: return "synth_synth";
    case Protocol::baseline: return "baseline";
    }
    return "?";
}

GenFn model_generator(const Model& gen) {
    return [&gen](const FontRecord& font) { return generate_all(gen, font); };
}

GenFn ground_truth_generator() {
    return [](const FontRecord& font) {
        GeneratedFont out;
        out.source_name = font.name;
        out.glyphs = font.glyphs;
        out.has_truth = true;
        out.sse.fill(0.0);
        return out;
    };
}

namespace {

bool judge_same(const EnsembleModel& disc, const std::array<const GlyphImage*, 4>& basis,
                const GlyphImage& candidate, std::vector<std::vector<float>>& scratch) {
    for (int b = 0; b < 4; ++b) glyph_to_unit(*basis[b], scratch[b].data());
    glyph_to_unit(candidate, scratch[4].data());
    return ensemble_vote(disc, scratch).same;
}

} // namespace

EvalReport evaluate_protocols(const EnsembleModel& disc, const GenFn& gen, const Atlas& test) {
    if (disc.members.empty()) throw Error(ErrorKind::configuration, "evaluate_protocols: empty ensemble");
    if (test.fonts.empty()) throw Error(ErrorKind::empty_corpus, "evaluate_protocols: no test fonts");

    auto letters = non_basis_letters();
    const int n_fonts = static_cast<int>(test.fonts.size());
    const int n_letters = static_cast<int>(letters.size());

    // decision[font][letter][protocol]
    std::vector<std::array<std::array<bool, 4>, 22>> decisions(n_fonts);
    std::vector<std::array<double, 22>> errors(n_fonts);

    parallel_for(static_cast<size_t>(n_fonts), [&](size_t fi) {
        const FontRecord& font = test.fonts[fi];
        GeneratedFont synth = gen(font);

        std::array<GlyphImage, 4> orig_basis = font.basis();
        std::array<GlyphImage, 4> synth_basis;
        for (int b = 0; b < 4; ++b) synth_basis[b] = synth.glyphs[letter_index(kBasisLetters[b])];

        std::array<const GlyphImage*, 4> orig_ptrs;
        std::array<const GlyphImage*, 4> synth_ptrs;
        for (int b = 0; b < 4; ++b) {
            orig_ptrs[b] = &orig_basis[b];
            synth_ptrs[b] = &synth_basis[b];
        }

        std::vector<std::vector<float>> scratch(5, std::vector<float>(kGlyphPixels));
        for (int li = 0; li < n_letters; ++li) {
            int idx = letter_index(letters[li]);
            const GlyphImage& orig = font.glyphs[idx];
            const GlyphImage& made = synth.glyphs[idx];
            auto& d = decisions[fi][li];
            d[0] = judge_same(disc, orig_ptrs, made, scratch);
            d[1] = judge_same(disc, synth_ptrs, orig, scratch);
            d[2] = judge_same(disc, synth_ptrs, made, scratch);
            d[3] = judge_same(disc, orig_ptrs, orig, scratch);
            errors[fi][li] = sse(orig, made);
        }
    });

    EvalReport report;
    report.rows.resize(n_letters);
    for (int li = 0; li < n_letters; ++li) {
        EvalRow& row = report.rows[li];
        row.letter = letters[li];
        long long same[4] = {0, 0, 0, 0};
        double err = 0.0;
        for (int fi = 0; fi < n_fonts; ++fi) {
            for (int p = 0; p < 4; ++p) same[p] += decisions[fi][li][p] ? 1 : 0;
            err += errors[fi][li];
        }
        row.orig_synth = static_cast<double>(same[0]) / n_fonts;
        row.synth_orig = static_cast<double>(same[1]) / n_fonts;
        row.synth_synth = static_cast<double>(same[2]) / n_fonts;
        row.baseline = static_cast<double>(same[3]) / n_fonts;
        row.sse_mean = err / n_fonts;
    }

    report.average.letter = '*';
    for (const EvalRow& row : report.rows) {
        report.average.sse_mean += row.sse_mean / n_letters;
        report.average.orig_synth += row.orig_synth / n_letters;
        report.average.synth_orig += row.synth_orig / n_letters;
        report.average.synth_synth += row.synth_synth / n_letters;
        report.average.baseline += row.baseline / n_letters;
    }

    for (int fi = 0; fi < n_fonts; ++fi) {
        for (int li = 0; li < n_letters; ++li) {
            for (int p = 0; p < 4; ++p) {
                DecisionRecord rec;
                rec.font = test.fonts[fi].name;
                rec.letter = letters[li];
                rec.protocol = static_cast<Protocol>(p);
                rec.judged_same = decisions[fi][li][p];
                report.decisions.push_back(rec);
            }
        }
    }
    return report;
}

namespace {

std::string format_row(const EvalRow& row) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%c,%.9g,%.9g,%.9g,%.9g,%.9g\n", row.letter, row.sse_mean,
                  row.orig_synth, row.synth_orig, row.synth_synth, row.baseline);
    return buf;
}

} // namespace

void write_eval_csv(const std::string& path, const EvalReport& report) {
    std::string text = "letter,sse,orig_synth,synth_orig,synth_synth,baseline\n";
    for (const EvalRow& row : report.rows) text += format_row(row);
    text += format_row(report.average);
    write_text_file(path, text);
}

void write_decision_csv(const std::string& path, const EvalReport& report) {
    std::string text = "font,letter,protocol,judged_same\n";
    for (const DecisionRecord& rec : report.decisions) {
        text += rec.font;
        text += ',';
        text += rec.letter;
        text += ',';
        text += protocol_name(rec.protocol);
        text += ',';
        text += rec.judged_same ? '1' : '0';
        text += '\n';
    }
    write_text_file(path, text);
}

std::vector<HomogeneitySource> homogeneity_source_from_atlas(const Atlas& atlas) {
    std::vector<HomogeneitySource> out;
    out.reserve(atlas.fonts.size());
    for (const FontRecord& font : atlas.fonts) {
        HomogeneitySource src;
        src.name = font.name;
        src.family_key = font.family_key;
        src.glyphs = font.glyphs;
        out.push_back(std::move(src));
    }
    return out;
}

std::vector<HomogeneitySource> homogeneity_source_generated(const Model& gen, const Atlas& atlas) {
    std::vector<HomogeneitySource> out(atlas.fonts.size());
    parallel_for(atlas.fonts.size(), [&](size_t i) {
        const FontRecord& font = atlas.fonts[i];
        GeneratedFont made = generate_all(gen, font);
        out[i].name = made.source_name;
        out[i].family_key = font.family_key;
        out[i].glyphs = made.glyphs;
    });
    return out;
}

HomogeneityResult homogeneity_test(const EnsembleModel& disc,
                                   const std::vector<HomogeneitySource>& fonts,
                                   long long n_pairs, uint64_t seed, const std::string& mode) {
    if (disc.members.empty()) throw Error(ErrorKind::configuration, "homogeneity_test: empty ensemble");
    if (n_pairs <= 0) throw Error(ErrorKind::configuration, "homogeneity_test: n_pairs must be positive");
    std::vector<std::string> families;
    for (const HomogeneitySource& f : fonts) families.push_back(f.family_key);
    std::sort(families.begin(), families.end());
    families.erase(std::unique(families.begin(), families.end()), families.end());
    if (families.size() < 2)
        throw Error(ErrorKind::sampling, "homogeneity_test: needs at least two font families");

    Rng base(seed);
    const int n = static_cast<int>(fonts.size());
    std::vector<uint8_t> different(static_cast<size_t>(n_pairs), 0);
    parallel_for(static_cast<size_t>(n_pairs), [&](size_t i) {
        Rng rng = base.fork(static_cast<uint64_t>(i));
        int basis_idx = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
        int cand_idx = basis_idx;
        for (int tries = 0; tries < 10000; ++tries) {
            cand_idx = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
            if (fonts[cand_idx].family_key != fonts[basis_idx].family_key) break;
            cand_idx = basis_idx;
        }
        if (cand_idx == basis_idx)
            throw Error(ErrorKind::sampling, "homogeneity_test: failed to draw a cross-family pair");
        int letter = static_cast<int>(rng.below(kLetterCount));

        std::vector<std::vector<float>> inputs(5, std::vector<float>(kGlyphPixels));
        const HomogeneitySource& basis_font = fonts[basis_idx];
        for (int b = 0; b < 4; ++b)
            glyph_to_unit(basis_font.glyphs[letter_index(kBasisLetters[b])], inputs[b].data());
        glyph_to_unit(fonts[cand_idx].glyphs[letter], inputs[4].data());
        different[i] = ensemble_vote(disc, inputs).same ? 0 : 1;
    });

    long long count = 0;
    for (uint8_t d : different) count += d;
    HomogeneityResult result;
    result.n_pairs = n_pairs;
    result.detection_rate = static_cast<double>(count) / static_cast<double>(n_pairs);
    result.mode = mode;
    return result;
}

} // namespace glyphforge
