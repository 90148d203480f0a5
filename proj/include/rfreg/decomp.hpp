#pragma once

#include "rfreg/damping.hpp"
#include "rfreg/ops.hpp"

namespace rfreg {

enum class DecompApplyTo { spatial_block_convs, all_convs };

struct DecompSpec {
    bool enabled = false;
    int Z = 4;
    DecompApplyTo apply_to = DecompApplyTo::spatial_block_convs;
};

// 1x1 reduce -> k x k core -> 1x1 expand, with no normalization or
// non-linearity in between. The original layer's stride and padding sit on
// the core conv.
struct DecomposedBlock {
    ConvLayer reduce;  // C_in -> C_out/Z, 1x1
    ConvLayer core;    // C_out/Z -> C_out/Z, k x k
    ConvLayer expand;  // C_out/Z -> C_out, 1x1

    std::size_t weight_count() const {
        return reduce.weight->numel() + core.weight->numel() + expand.weight->numel();
    }
};

DecomposedBlock decompose_layer(int c_in, int c_out, int k, int z, Conv2dParams original = {});

// C_in*(C_out/Z) + (C_out/Z)^2*k^2 + (C_out/Z)*C_out, plus the three biases
// if requested.
long decomp_param_count(int c_in, int c_out, int k, int z, bool include_bias);

TensorPtr decomposed_forward(Tape* tape, const TensorPtr& x, const DecomposedBlock& block);
TensorPtr damped_decomposed_forward(Tape* tape, const TensorPtr& x, const DecomposedBlock& block,
                                    const DampingMatrix& core_damping);

}  // namespace rfreg
