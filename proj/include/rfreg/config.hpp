#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rfreg/audio.hpp"
#include "rfreg/model.hpp"
#include "rfreg/pruning.hpp"

namespace rfreg {

struct OptimizerConfig {
    float lr = 0.02f;
    float momentum = 0.9f;
    float weight_decay = 1e-4f;
    int epochs = 120;
    int warmup_epochs = 5;
    int batch_size = 16;
    float lr_decay = 0.5f;
    int decay_every = 30;
};

struct DataConfig {
    std::string kind = "synthetic";  // synthetic | manifest
    SynthConfig synth;
    std::uint64_t seed = 0;  // 0 = follow the experiment seed
    std::string manifest;
    FeatureConfig features;
};

struct PruneConfig {
    bool enabled = false;
    long target_nonzero = 400000;  // whole-model non-zero count
    int ramp_epochs = 100;
    PruneScope scope = PruneScope::global;
};

struct ExperimentConfig {
    std::string name = "run";
    ArchSpec arch;
    DataConfig data;
    OptimizerConfig optimizer;
    PruneConfig prune;
    std::uint64_t seed = 1;
    std::string report_dir = "runs";

    // Sweep axes (used by the sweep subcommand only).
    std::vector<int> sweep_rhos;
    std::vector<std::string> sweep_variants;
    std::vector<int> sweep_widths;
    std::vector<std::uint64_t> sweep_seeds;
};

// Flat `key = value` config with dotted sections; '#' starts a comment.
// Unknown keys are rejected.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace rfreg
