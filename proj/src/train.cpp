#include "glyphforge/train.hpp"

#include <cmath>
#include <cstdio>

#include "glyphforge/bytes.hpp"
#include "glyphforge/error.hpp"
#include "glyphforge/parallel.hpp"

namespace glyphforge {

double loss_bce(double pred, int label) {
    if (label != 0 && label != 1)
        fail(ErrorKind::invalid_argument, "label must be 0 or 1");
    double p = std::min(std::max(pred, 1e-7), 1.0 - 1e-7);
    return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

double loss_bce_grad(double pred, int label) {
    if (label != 0 && label != 1)
        fail(ErrorKind::invalid_argument, "label must be 0 or 1");
    double p = std::min(std::max(pred, 1e-7), 1.0 - 1e-7);
    return label == 1 ? -1.0 / p : 1.0 / (1.0 - p);
}

double loss_l2(const std::vector<float>& pred, const std::vector<float>& target) {
    if (pred.size() != target.size())
        fail(ErrorKind::invalid_argument, "loss_l2 shape mismatch: " +
                                              std::to_string(pred.size()) + " vs " +
                                              std::to_string(target.size()));
    double sum = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        double d = static_cast<double>(pred[i]) - target[i];
        sum += d * d;
    }
    return sum;
}

void sgd_momentum_step(std::vector<float>& weights, const std::vector<float>& grads,
                       OptimizerState& state, long long step_index) {
    if (grads.size() != weights.size())
        fail(ErrorKind::invalid_argument, "gradient/weight size mismatch");
    if (state.velocity.empty())
        state.velocity.assign(weights.size(), 0.0f);
    if (state.velocity.size() != weights.size())
        fail(ErrorKind::invalid_argument, "velocity/weight size mismatch");

    float mu = static_cast<float>(state.momentum);
    float eta = static_cast<float>(state.learning_rate);
    for (size_t i = 0; i < weights.size(); ++i) {
        if (!std::isfinite(grads[i]))
            fail(ErrorKind::training_divergence,
                 "non-finite gradient at step " + std::to_string(step_index));
        float v = mu * state.velocity[i] - eta * grads[i];
        state.velocity[i] = v;
        weights[i] += v;
    }
}

void accumulate_example_grads(size_t count, size_t param_count,
                              const std::function<void(size_t, std::vector<float>&)>& example_fn,
                              std::vector<float>& total) {
    total.assign(param_count, 0.0f);
    if (count == 0)
        return;

    size_t lanes = std::min<size_t>(count, std::max(1, thread_count()));
    std::vector<std::vector<float>> lane_grads(lanes);

    for (size_t begin = 0; begin < count; begin += lanes) {
        size_t chunk = std::min(lanes, count - begin);
        parallel_for(chunk, [&](size_t k) {
            lane_grads[k].assign(param_count, 0.0f);
            example_fn(begin + k, lane_grads[k]);
        });
        for (size_t k = 0; k < chunk; ++k) {
            const std::vector<float>& g = lane_grads[k];
            for (size_t i = 0; i < param_count; ++i)
                total[i] += g[i];
        }
    }
}

void write_metric_csv(const std::string& path, const std::string& header,
                      const std::vector<EpochStat>& stats) {
    std::string text = header + "\n";
    char buf[96];
    for (const EpochStat& s : stats) {
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g\n", s.epoch, s.train_loss, s.val_metric);
        text += buf;
    }
    write_text_file(path, text);
}

} // namespace glyphforge
