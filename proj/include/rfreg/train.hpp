#pragma once

#include "rfreg/checkpoint.hpp"
#include "rfreg/config.hpp"

namespace rfreg {

struct EpochStats {
    int epoch = 0;
    float lr = 0.0f;
    double train_loss = 0.0, train_acc = 0.0;
    double test_loss = 0.0, test_acc = 0.0;
    long nonzero_params = 0;
};

struct RunRecord {
    std::vector<EpochStats> epochs;
    double final_accuracy = 0.0;  // mean test accuracy over the last 10 epochs
    ModelSummary summary;
    std::string record_path, checkpoint_path;
};

float learning_rate(const OptimizerConfig& opt, int epoch);

// Loads (or synthesizes) the dataset, trains with optional damping /
// decomposition / pruning, writes record.csv + checkpoint + config under
// report_dir/name. Deterministic given the seed.
RunRecord run(const ExperimentConfig& cfg);

// The dataset is built once here so paired variants see identical data.
RunRecord run_on(const ExperimentConfig& cfg, const Dataset& train, const Dataset& test);

struct SweepCell {
    int rho = 0;
    std::string variant;
    int width = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double final_accuracy = 0.0;
    long nonzero = 0;
    int rf_t = 0, rf_f = 0;
};

// Grid over rho x variant x width x seed. A failed cell is recorded and the
// sweep continues. Writes summary.csv under report_dir.
std::vector<SweepCell> sweep(const ExperimentConfig& base);

ExperimentConfig apply_variant(ExperimentConfig cfg, const std::string& variant);

}  // namespace rfreg
