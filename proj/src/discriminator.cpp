#include "glyphforge/discriminator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "glyphforge/bytes.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/parallel.hpp"

namespace glyphforge {
namespace {

void check_tower_model(const Model& m) {
    if (m.input_count() != 5)
        fail(ErrorKind::configuration, "discriminator needs a 5-input architecture, got " +
                                           std::to_string(m.input_count()));
    if (m.head_count() != 1 || m.nodes[m.output_nodes[0]].out_len() != 1)
        fail(ErrorKind::configuration,
             "discriminator architecture must end in a single scalar output");
}

void glyph_to_input(const GlyphImage& g, std::vector<float>& out) {
    out.resize(kGlyphPixels);
    for (int i = 0; i < kGlyphPixels; ++i)
        out[i] = static_cast<float>(g.pixels[i]) * (1.0f / 255.0f);
}

void jittered_letter_input(const Atlas& atlas, int font, int letter,
                           const std::array<int8_t, 2>& offsets, std::vector<float>& out) {
    GlyphImage g = jitter(atlas.fonts[font].glyphs[letter], offsets[0], offsets[1]);
    glyph_to_input(g, out);
}

} // namespace

PairInputs materialize_pair(const Atlas& atlas, const PairExample& ex) {
    PairInputs out;
    for (int k = 0; k < 4; ++k) {
        int letter = letter_index(kBasisLetters[k]);
        out.basis[k] =
            jitter(atlas.fonts[ex.basis_font].glyphs[letter], ex.jitters[k][0], ex.jitters[k][1]);
    }
    out.candidate = jitter(atlas.fonts[ex.candidate_font].glyphs[ex.candidate_letter],
                           ex.jitters[4][0], ex.jitters[4][1]);
    return out;
}

void pair_to_inputs(const Atlas& atlas, const PairExample& ex,
                    std::vector<std::vector<float>>& inputs) {
    inputs.resize(5);
    for (int k = 0; k < 4; ++k)
        jittered_letter_input(atlas, ex.basis_font, letter_index(kBasisLetters[k]),
                              ex.jitters[k], inputs[k]);
    jittered_letter_input(atlas, ex.candidate_font, ex.candidate_letter, ex.jitters[4],
                          inputs[4]);
}

PairExample sample_pair(const Atlas& atlas, Rng& rng, bool positive) {
    size_t n = atlas.fonts.size();
    if (n == 0)
        fail(ErrorKind::empty_corpus, "cannot sample from an empty atlas");

    PairExample ex;
    ex.basis_font = static_cast<int>(rng.below(n));
    if (positive) {
        ex.candidate_font = ex.basis_font;
        ex.label = 1;
    } else {
        const std::string& basis_family = atlas.fonts[ex.basis_font].family_key;
        bool found = false;
        // Uniform over fonts of other families, by rejection.
        for (int tries = 0; tries < 10000; ++tries) {
            int cand = static_cast<int>(rng.below(n));
            if (atlas.fonts[cand].family_key != basis_family) {
                ex.candidate_font = cand;
                found = true;
                break;
            }
        }
        if (!found)
            fail(ErrorKind::sampling,
                 "cannot draw a different-family candidate (single-family atlas?)");
        ex.label = 0;
    }
    ex.candidate_letter = static_cast<int>(rng.below(kLetterCount));
    for (int k = 0; k < 5; ++k) {
        ex.jitters[k][0] = static_cast<int8_t>(rng.range_int(-kJitterMax, kJitterMax));
        ex.jitters[k][1] = static_cast<int8_t>(rng.range_int(-kJitterMax, kJitterMax));
    }
    return ex;
}

std::vector<PairExample> make_dataset(const Atlas& atlas, int n_pos, int n_neg, uint64_t seed) {
    if (n_pos <= 0 || n_neg <= 0)
        fail(ErrorKind::invalid_argument, "dataset sizes must be positive");
    if (!atlas.fonts.empty() && n_neg > 0 && atlas.family_keys().size() < 2)
        fail(ErrorKind::sampling, "negative sampling needs at least two families");

    size_t total = static_cast<size_t>(n_pos) + static_cast<size_t>(n_neg);
    std::vector<PairExample> examples(total);
    Rng base(seed);
    parallel_for(total, [&](size_t i) {
        Rng stream = base.fork(i);
        examples[i] = sample_pair(atlas, stream, i < static_cast<size_t>(n_pos));
    });

    Rng shuffler = base.fork(total + 1);
    for (size_t i = total; i > 1; --i)
        std::swap(examples[i - 1], examples[shuffler.below(i)]);

    if (audit_negative_pairs(atlas, examples) != 0)
        fail(ErrorKind::sampling, "negative pair audit failed");
    return examples;
}

int audit_negative_pairs(const Atlas& atlas, const std::vector<PairExample>& examples) {
    int violations = 0;
    for (const PairExample& ex : examples) {
        if (ex.label != 0)
            continue;
        if (atlas.fonts[ex.basis_font].family_key == atlas.fonts[ex.candidate_font].family_key)
            ++violations;
    }
    return violations;
}

double predict(const Model& m, const std::vector<std::vector<float>>& inputs) {
    Activations acts;
    forward(m, inputs, acts);
    return acts.value[m.output_nodes[0]][0];
}

double predict_pair(const Model& m, const std::array<const GlyphImage*, 4>& basis,
                    const GlyphImage& candidate) {
    std::vector<std::vector<float>> inputs(5);
    for (int k = 0; k < 4; ++k)
        glyph_to_input(*basis[k], inputs[k]);
    glyph_to_input(candidate, inputs[4]);
    return predict(m, inputs);
}

double dataset_accuracy(const Model& m, const Atlas& atlas,
                        const std::vector<PairExample>& examples) {
    if (examples.empty())
        fail(ErrorKind::invalid_argument, "cannot evaluate an empty dataset");
    std::vector<uint8_t> correct(examples.size());
    parallel_for(examples.size(), [&](size_t i) {
        std::vector<std::vector<float>> inputs;
        pair_to_inputs(atlas, examples[i], inputs);
        double p = predict(m, inputs);
        correct[i] = (p >= 0.5 ? 1 : 0) == examples[i].label ? 1 : 0;
    });
    long long hits = 0;
    for (uint8_t c : correct)
        hits += c;
    return static_cast<double>(hits) / static_cast<double>(examples.size());
}

Model train_discriminator(const ArchDescriptor& desc, const Atlas& train_atlas,
                          const std::vector<PairExample>& train_set, const Atlas& val_atlas,
                          const std::vector<PairExample>& val_set, const TrainOptions& opt,
                          std::vector<EpochStat>* log) {
    if (train_set.empty() || val_set.empty())
        fail(ErrorKind::invalid_argument, "training and validation sets must be nonempty");

    Model m = build_model<float>(desc);
    check_tower_model(m);
    init_weights(m, opt.seed);

    OptimizerState state;
    state.learning_rate = opt.learning_rate;
    state.momentum = opt.momentum;

    Rng epoch_rng(mix64(opt.seed ^ 0x7261696e64697363ull));
    std::vector<size_t> order(train_set.size());
    for (size_t i = 0; i < order.size(); ++i)
        order[i] = i;

    std::vector<float> batch_grads;
    std::vector<double> example_loss(train_set.size());
    std::vector<float> best_weights = m.weights;
    double best_val = -1.0;
    int stale_epochs = 0;
    long long step = 0;

    for (int epoch = 1; epoch <= opt.max_epochs; ++epoch) {
        Rng shuffler = epoch_rng.fork(static_cast<uint64_t>(epoch));
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffler.below(i)]);

        double epoch_loss = 0.0;
        for (size_t begin = 0; begin < order.size(); begin += static_cast<size_t>(opt.batch_size)) {
            size_t count = std::min(static_cast<size_t>(opt.batch_size), order.size() - begin);
            float inv = 1.0f / static_cast<float>(count);
            accumulate_example_grads(
                count, m.weights.size(),
                [&](size_t k, std::vector<float>& grads) {
                    const PairExample& ex = train_set[order[begin + k]];
                    std::vector<std::vector<float>> inputs;
                    pair_to_inputs(train_atlas, ex, inputs);
                    Activations acts;
                    forward(m, inputs, acts);
                    double p = acts.value[m.output_nodes[0]][0];
                    example_loss[begin + k] = loss_bce(p, ex.label);
                    std::vector<std::vector<float>> out_grads(1);
                    out_grads[0] = {static_cast<float>(loss_bce_grad(p, ex.label))};
                    backward(m, acts, out_grads, grads);
                },
                batch_grads);
            for (float& g : batch_grads)
                g *= inv;
            sgd_momentum_step(m.weights, batch_grads, state, step++);
        }
        for (size_t i = 0; i < order.size(); ++i)
            epoch_loss += example_loss[i];
        double train_loss = epoch_loss / static_cast<double>(train_set.size());
        if (!std::isfinite(train_loss))
            fail(ErrorKind::training_divergence,
                 "non-finite training loss at epoch " + std::to_string(epoch));

        double val_acc = dataset_accuracy(m, val_atlas, val_set);
        if (log)
            log->push_back({epoch, train_loss, val_acc});
        if (val_acc > best_val) {
            best_val = val_acc;
            best_weights = m.weights;
            stale_epochs = 0;
        } else if (++stale_epochs >= opt.patience) {
            break;
        }
    }

    m.weights = std::move(best_weights);
    return m;
}

VoteResult ensemble_vote(const EnsembleModel& e, const std::vector<std::vector<float>>& inputs) {
    if (e.members.empty() || e.members.size() % 2 == 0)
        fail(ErrorKind::configuration,
             "ensemble needs an odd number of members, got " + std::to_string(e.members.size()));
    VoteResult r;
    r.votes.resize(e.members.size());
    int same_votes = 0;
    for (size_t k = 0; k < e.members.size(); ++k) {
        r.votes[k] = predict(e.members[k], inputs) >= 0.5 ? 1 : 0;
        same_votes += r.votes[k];
    }
    r.same = same_votes * 2 > static_cast<int>(e.members.size());
    return r;
}

VoteReport vote_distribution(const EnsembleModel& e, const Atlas& atlas,
                             const std::vector<PairExample>& examples) {
    if (e.members.empty() || e.members.size() % 2 == 0)
        fail(ErrorKind::configuration,
             "ensemble needs an odd number of members, got " + std::to_string(e.members.size()));
    if (examples.empty())
        fail(ErrorKind::invalid_argument, "cannot evaluate an empty dataset");

    size_t m_count = e.members.size();
    std::vector<int> wrong(examples.size());
    parallel_for(examples.size(), [&](size_t i) {
        std::vector<std::vector<float>> inputs;
        pair_to_inputs(atlas, examples[i], inputs);
        int w = 0;
        for (const Model& member : e.members) {
            int decision = predict(member, inputs) >= 0.5 ? 1 : 0;
            if (decision != examples[i].label)
                ++w;
        }
        wrong[i] = w;
    });

    VoteReport report;
    report.buckets.assign(m_count + 1, 0);
    report.total = static_cast<long long>(examples.size());
    for (int w : wrong)
        ++report.buckets[static_cast<size_t>(w)];
    long long correct = 0;
    for (size_t b = 0; b <= (m_count - 1) / 2; ++b)
        correct += report.buckets[b];
    report.ensemble_accuracy = static_cast<double>(correct) / static_cast<double>(report.total);
    return report;
}

void write_vote_csv(const std::string& path, const VoteReport& report) {
    std::string text = "bucket,count,fraction\n";
    char buf[96];
    for (size_t b = 0; b < report.buckets.size(); ++b) {
        std::snprintf(buf, sizeof buf, "%zu,%lld,%.9g\n", b, report.buckets[b],
                      static_cast<double>(report.buckets[b]) /
                          static_cast<double>(report.total));
        text += buf;
    }
    write_text_file(path, text);
}

} // namespace glyphforge
