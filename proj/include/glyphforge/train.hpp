#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "glyphforge/model.hpp"

namespace glyphforge {

// Binary cross-entropy on a single probability; pred is clamped to
// [1e-7, 1-1e-7] before the logs.
double loss_bce(double pred, int label);
// d loss_bce / d pred at the clamped point.
double loss_bce_grad(double pred, int label);

// Summed squared error; shapes must match.
double loss_l2(const std::vector<float>& pred, const std::vector<float>& target);

struct OptimizerState {
    double learning_rate = 0.01;
    double momentum = 0.9;
    std::vector<float> velocity;
};

// Classical momentum: v <- mu*v - eta*g; w <- w + v.  `step_index` is only
// used to label divergence errors.
void sgd_momentum_step(std::vector<float>& weights, const std::vector<float>& grads,
                       OptimizerState& state, long long step_index);

// Sums per-example gradient vectors over [0, count) into `total`.  Examples
// are computed independently (possibly in parallel) but reduced serially in
// index order, so the result is bit-identical for any worker count.
void accumulate_example_grads(size_t count, size_t param_count,
                              const std::function<void(size_t, std::vector<float>&)>& example_fn,
                              std::vector<float>& total);

struct EpochStat {
    int epoch = 0;
    double train_loss = 0.0;
    double val_metric = 0.0; // accuracy or SSE depending on the trainer
};

struct TrainOptions {
    uint64_t seed = 1;
    double learning_rate = 0.01;
    double momentum = 0.9;
    int batch_size = 64;
    int max_epochs = 20;
    int patience = 5;
};

// Writes "epoch,train_loss,val_accuracy" rows (header configurable).
void write_metric_csv(const std::string& path, const std::string& header,
                      const std::vector<EpochStat>& stats);

} // namespace glyphforge
