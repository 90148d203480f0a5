#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfreg/damping.hpp"
#include "rfreg/decomp.hpp"
#include "rfreg/ops.hpp"
#include "rfreg/rf.hpp"

namespace rfreg {

// Declarative description of the residual network: strided two-conv stem,
// three stages of residual blocks (channels x1, x2, x4 from base_channels,
// 2x2 max-pool between stages 1 and 2), global average pool, classifier.
struct ArchSpec {
    int base_channels = 128;
    int rho = 7;
    int num_blocks = 7;
    int num_classes = 10;
    int in_channels = 2;
    DampingSpec damping;
    DecompSpec decomp;

    // Blocks per stage, front-loaded: 7 -> {4, 2, 1}. Later stages may be
    // empty for very small block counts.
    std::vector<int> stage_blocks() const;
    void validate() const;  // throws ValidationError listing all violations
};

// A conv position in the network: plain or decomposed, optionally damped.
// Damping acts on the spatial conv only; 1x1 convs keep the scalar 1.
struct ConvUnit {
    bool decomposed = false;
    ConvLayer conv;
    DecomposedBlock block;
    bool damped = false;
    DampingMatrix damp;

    TensorPtr forward(Tape* tape, const TensorPtr& x) const;
    int kernel() const { return decomposed ? block.core.k_t() : conv.k_t(); }
};

struct ResBlock {
    ConvUnit conv1, conv2;
    BatchNorm bn1, bn2;
    bool has_proj = false;
    ConvLayer proj;
    BatchNorm proj_bn;
};

struct Network {
    ArchSpec spec;
    ConvUnit stem1, stem2;
    BatchNorm stem_bn1, stem_bn2;
    std::vector<ResBlock> blocks;
    int pool_after_block = -1;  // index of last stage-1 block, -1 for no pool
    TensorPtr fc_weight, fc_bias;
    std::vector<ParamRef> params;

    // Output of the final residual block in the latest forward pass; the ERF
    // probe seeds its gradient here.
    TensorPtr last_feature;

    // Non-const: batchnorm running stats update in train mode.
    TensorPtr forward(Tape* tape, const TensorPtr& x, bool train);
    std::vector<LayerGeom> geometry() const;
};

Network build(const ArchSpec& spec);
void init_weights(Network& net, std::uint64_t seed);

struct LayerCount {
    std::string name;
    std::vector<int> shape;
    long total = 0;
    long nonzero = 0;
};

struct ModelSummary {
    long total_params = 0;
    long nonzero_params = 0;
    RFResult rf;
    std::vector<LayerCount> per_layer;
};

ModelSummary summarize(const Network& net);

// Named references to every BatchNorm, for checkpointing running stats.
std::vector<std::pair<std::string, BatchNorm*>> batchnorm_refs(Network& net);

}  // namespace rfreg
