#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfreg/model.hpp"

namespace rfreg {

enum class PruneScope { global, per_layer };

PruneScope prune_scope_from_string(const std::string& s);

// Global magnitude-pruning state: one binary mask per prunable tensor, plus
// the ramp schedule parameters. A mask bit that drops to 0 stays 0.
struct PruneState {
    long target_nonzero = 400000;
    int ramp_epochs = 100;
    double gamma = 0.0;  // filled from ramp_epochs when <= 0
    PruneScope scope = PruneScope::global;

    std::vector<std::vector<std::uint8_t>> masks;  // aligned with prunable params, in param order
    std::vector<std::size_t> prunable_params;      // indices into Network::params
    long total_prunable = 0;
    long pruned_count = 0;
};

// Decay constant gamma with 1 - gamma^E = 0.999 (~0.933 for E = 100).
double prune_gamma(int ramp_epochs);

// Pruned-count ramp: round(N_final * (1 - gamma^e) / (1 - gamma^E)) for
// e < E, N_final from e = E on. Starts at 0, hits N_final exactly at E, and
// the per-epoch increments decay geometrically.
long schedule_pruned_count(int epoch, long total_prunable, long target_nonzero, int ramp_epochs, double gamma);

void init_prune_state(PruneState& state, const Network& net);

// Zeros the new_pruned_count - pruned_count unpruned weights of smallest
// magnitude (ties broken by param order, then flat index) and clears their
// mask bits.
void apply_magnitude_pruning(Network& net, PruneState& state, long new_pruned_count);

// Re-zeros every masked weight; called after each optimizer step.
void enforce_masks(Network& net, const PruneState& state);

}  // namespace rfreg
