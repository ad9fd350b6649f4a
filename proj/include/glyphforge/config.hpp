#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace glyphforge {

// Run parameters shared by the CLI commands; parsed from plain key=value
// text with unknown keys rejected.
struct RunConfig {
    uint64_t seed = 1;

    double learning_rate = 0.05;
    double momentum = 0.9;
    int batch_size = 64;
    int max_epochs = 20;
    int patience = 5;
    std::string arch = "net1";
    // optional per-network override, keys learning_rate_net1..net7;
    // negative means "use learning_rate"
    std::array<double, 7> net_learning_rate{-1, -1, -1, -1, 0.02, 0.02, 0.005};

    int n_pos = 20000;
    int n_neg = 20000;
    int val_pos = 2000;
    int val_neg = 2000;

    double gen_learning_rate = 0.0005;
    double gen_momentum = 0.9;
    int gen_batch_size = 16;
    int gen_max_epochs = 40;
    int gen_patience = 8;

    int test_families = 110;
    int val_families = 40;
    long long homogeneity_pairs = 50000;

    double net_lr(int net) const; // net is 1-based
    void validate() const;        // throws configuration error
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg); // canonical form

} // namespace glyphforge
