#pragma once

#include <string>
#include <vector>

#include "rfreg/model.hpp"
#include "rfreg/pruning.hpp"

namespace rfreg {

// Checkpoint container: a text manifest (name, dtype, shape, offset, count)
// followed by raw little-endian float32 buffers. Layout documented in the
// README.
struct CheckpointEntry {
    std::string name;
    std::vector<int> shape;
    std::vector<float> data;
};

void save_checkpoint(const std::string& path, const std::vector<CheckpointEntry>& entries);
std::vector<CheckpointEntry> load_checkpoint(const std::string& path);

// Parameters, batchnorm running stats, and (when pruning) masks.
std::vector<CheckpointEntry> network_entries(Network& net, const PruneState* prune);
void restore_network(Network& net, const std::vector<CheckpointEntry>& entries, PruneState* prune);

}  // namespace rfreg
