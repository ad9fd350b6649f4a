#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "glyphforge/atlas.hpp"
#include "glyphforge/model.hpp"
#include "glyphforge/rng.hpp"
#include "glyphforge/train.hpp"

namespace glyphforge {

// A same-font/different-font question: jittered B,A,S,Q of the basis font
// plus a jittered candidate glyph.  Stored as atlas indices + jitter offsets;
// materialize on demand.
struct PairExample {
    int basis_font = 0;
    int candidate_font = 0;
    int candidate_letter = 0; // 0..25
    int label = 0;            // 1 = same font, 0 = different font
    std::array<std::array<int8_t, 2>, 5> jitters{}; // B,A,S,Q,candidate (dx,dy)
};

struct PairInputs {
    std::array<GlyphImage, 4> basis;
    GlyphImage candidate;
};

PairInputs materialize_pair(const Atlas& atlas, const PairExample& ex);

// Fills the 5 scaled input vectors for a tower network.
void pair_to_inputs(const Atlas& atlas, const PairExample& ex,
                    std::vector<std::vector<float>>& inputs);

PairExample sample_pair(const Atlas& atlas, Rng& rng, bool positive);

// n_pos positives then n_neg negatives, sampled from per-example forked
// streams and shuffled; deterministic under seed.
std::vector<PairExample> make_dataset(const Atlas& atlas, int n_pos, int n_neg, uint64_t seed);

// Number of negative examples whose two fonts share a family key (always 0).
int audit_negative_pairs(const Atlas& atlas, const std::vector<PairExample>& examples);

Model train_discriminator(const ArchDescriptor& desc, const Atlas& train_atlas,
                          const std::vector<PairExample>& train_set, const Atlas& val_atlas,
                          const std::vector<PairExample>& val_set, const TrainOptions& opt,
                          std::vector<EpochStat>* log);

double predict(const Model& m, const std::vector<std::vector<float>>& inputs);
double predict_pair(const Model& m, const std::array<const GlyphImage*, 4>& basis,
                    const GlyphImage& candidate);

double dataset_accuracy(const Model& m, const Atlas& atlas,
                        const std::vector<PairExample>& examples);

struct EnsembleModel {
    std::vector<Model> members;
};

struct VoteResult {
    bool same = false;
    std::vector<int> votes; // per-member 0/1 decisions
};

VoteResult ensemble_vote(const EnsembleModel& e, const std::vector<std::vector<float>>& inputs);

struct VoteReport {
    std::vector<long long> buckets; // index = number of wrong members
    long long total = 0;
    double ensemble_accuracy = 0.0;
};

VoteReport vote_distribution(const EnsembleModel& e, const Atlas& atlas,
                             const std::vector<PairExample>& examples);

void write_vote_csv(const std::string& path, const VoteReport& report);

} // namespace glyphforge
