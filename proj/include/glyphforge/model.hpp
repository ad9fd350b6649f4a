#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glyphforge/descriptor.hpp"
#include "glyphforge/rng.hpp"

namespace glyphforge {

enum class NodeKind {
    input,
    fc,
    conv,
    pool,
    relu,
    logistic,
    concat,
    add,
    local_patch,
};

// One vertex of the computation graph.  Weights live in the owning model's
// flat weight array; nodes only carry offsets into it.
struct Node {
    NodeKind kind = NodeKind::input;
    std::string name;
    std::vector<int> inputs; // producer node indices

    // output shape (height, width, channels); fc-style vectors are (1,1,n)
    int out_h = 1, out_w = 1, out_c = 1;
    // input shape for layers that need it
    int in_h = 1, in_w = 1, in_c = 1;

    int kernel = 0; // conv
    int patch = 0;  // local_patch tile size
    int aux = 0;    // input nodes: glyph ordinal

    size_t w_off = 0, w_len = 0; // weight slice
    size_t b_off = 0, b_len = 0; // bias slice

    size_t out_len() const { return static_cast<size_t>(out_h) * out_w * out_c; }
    size_t in_len() const { return static_cast<size_t>(in_h) * in_w * in_c; }
};

template <typename T> struct ModelT {
    std::string descriptor; // canonical text this graph was built from
    std::vector<Node> nodes;
    std::vector<int> input_nodes;  // one per glyph input
    std::vector<int> output_nodes; // one per head
    std::vector<T> weights;

    size_t param_count() const { return weights.size(); }
    int input_count() const { return static_cast<int>(input_nodes.size()); }
    int head_count() const { return static_cast<int>(output_nodes.size()); }
};

using Model = ModelT<float>;

// Per-node forward cache; `pool_arg` keeps winning input indices for pools.
template <typename T> struct ActivationsT {
    std::vector<std::vector<T>> value;
    std::vector<std::vector<int>> pool_arg;

    bool ready() const { return !value.empty(); }
};

using Activations = ActivationsT<float>;

template <typename T> ModelT<T> build_model(const ArchDescriptor& desc);
template <typename T> ModelT<T> build_model(const std::string& descriptor_text);

// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.
template <typename T> void init_weights(ModelT<T>& m, uint64_t seed);

// inputs: one [0,1]-scaled vector of length 1296 per input node.
template <typename T>
void forward(const ModelT<T>& m, const std::vector<std::vector<T>>& inputs,
             ActivationsT<T>& acts);

// Accumulates dLoss/dWeights into `weight_grads` (+=) given dLoss/dOutput for
// every head.  Requires the cache produced by forward.
template <typename T>
void backward(const ModelT<T>& m, const ActivationsT<T>& acts,
              const std::vector<std::vector<T>>& output_grads, std::vector<T>& weight_grads);

// Central-difference verification of backward at one evaluation point; the
// loss is the summed squared error of every head against `targets`.
// Returns max over weights of |analytic - numeric| / max(|a|,|n|,1e-8).
double grad_check(ModelT<double>& m, const std::vector<std::vector<double>>& inputs,
                  const std::vector<std::vector<double>>& targets, double eps);

// Builds a double-precision instance of the descriptor, picks an evaluation
// point clear of relu kinks and pool ties, and runs grad_check with eps=1e-5.
double grad_check_arch(const ArchDescriptor& desc, uint64_t seed);

void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);
// Loads weights from `path` into an existing graph; descriptor text must
// match exactly.
void load_model_into(Model& m, const std::string& path);

} // namespace glyphforge
