#pragma once

#include <string>
#include <vector>

#include "rfreg/ops.hpp"
#include "rfreg/tensor.hpp"

namespace rfreg {

enum class DampAxis { frequency, time, both };

DampAxis damp_axis_from_string(const std::string& s);
std::string to_string(DampAxis axis);

struct DampingSpec {
    bool enabled = false;
    float lambda = 0.1f;
    DampAxis axis = DampAxis::frequency;
};

// Non-trainable attenuation matrix matching a conv kernel's spatial shape.
// 1 at the center, decaying linearly to lambda at the edges of each damped
// axis; constant along undamped axes.
struct DampingMatrix {
    int k_t = 1;
    int k_f = 1;
    std::vector<float> values;  // k_t * k_f, row-major

    float at(int h, int w) const { return values[static_cast<std::size_t>(h) * k_f + w]; }
};

DampingMatrix build_damping_matrix(int k_t, int k_f, const DampingSpec& spec);

// Forward as conv2d with weight replaced by W ⊙ C; grad wrt W is the plain
// weight gradient multiplied element-wise by C. C itself never gets a grad.
TensorPtr damped_conv2d(Tape* tape, const TensorPtr& x, const ConvLayer& layer, const DampingMatrix& C);

}  // namespace rfreg
