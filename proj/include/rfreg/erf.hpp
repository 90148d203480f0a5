#pragma once

#include "rfreg/model.hpp"

namespace rfreg {

struct ErfReport {
    int t = 0, f = 0;
    std::vector<float> energy_map;  // [t, f] mean |d output / d input| over batch and channels
    int argmax_t = 0, argmax_f = 0;
    int width_t = 0, width_f = 0;  // extent holding energy_fraction of the mass, grown from the argmax
    float energy_fraction = 0.95f;
    bool clipped = false;  // theoretical RF exceeded the input extent

    float at(int it, int jf) const { return energy_map[static_cast<std::size_t>(it) * f + jf]; }
};

// Backprops a unit gradient from the spatially central position of the last
// conv feature map (all channels) down to the input.
ErfReport measure_erf(Network& net, const TensorPtr& input_batch, float energy_fraction = 0.95f);

// Bounding box of strictly positive energy, per axis.
std::pair<int, int> support_extent(const ErfReport& report);

}  // namespace rfreg
