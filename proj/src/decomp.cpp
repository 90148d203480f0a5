#include "rfreg/decomp.hpp"

#include <string>

namespace rfreg {

namespace {

void validate_decomp(int c_in, int c_out, int k, int z) {
    if (c_in < 1 || c_out < 1 || k < 1 || z < 1)
        throw ValidationError("decompose_layer: sizes must be positive");
    if (c_out % z != 0)
        throw ConfigError("decompose_layer: C_out=" + std::to_string(c_out) + " not divisible by Z=" +
                          std::to_string(z) + " for layer " + std::to_string(c_in) + "->" +
                          std::to_string(c_out) + " k=" + std::to_string(k));
}

}  // namespace

DecomposedBlock decompose_layer(int c_in, int c_out, int k, int z, Conv2dParams original) {
    validate_decomp(c_in, c_out, k, z);
    int mid = c_out / z;
    DecomposedBlock block;
    block.reduce = make_conv(c_in, mid, 1, 1);
    Conv2dParams core_params = original;  // stride and padding stay on the k x k conv
    block.core = make_conv(mid, mid, k, k, core_params);
    block.expand = make_conv(mid, c_out, 1, 1);
    return block;
}

long decomp_param_count(int c_in, int c_out, int k, int z, bool include_bias) {
    validate_decomp(c_in, c_out, k, z);
    long mid = c_out / z;
    long count = static_cast<long>(c_in) * mid + mid * mid * k * k + mid * c_out;
    if (include_bias) count += mid + mid + c_out;
    return count;
}

TensorPtr decomposed_forward(Tape* tape, const TensorPtr& x, const DecomposedBlock& block) {
    auto h = conv2d(tape, x, block.reduce);
    h = conv2d(tape, h, block.core);
    return conv2d(tape, h, block.expand);
}

TensorPtr damped_decomposed_forward(Tape* tape, const TensorPtr& x, const DecomposedBlock& block,
                                    const DampingMatrix& core_damping) {
    auto h = conv2d(tape, x, block.reduce);
    h = damped_conv2d(tape, h, block.core, core_damping);
    return conv2d(tape, h, block.expand);
}

}  // namespace rfreg
