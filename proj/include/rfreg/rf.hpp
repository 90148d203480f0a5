#pragma once

#include <vector>

#include "rfreg/tensor.hpp"

namespace rfreg {

// Geometry of one layer as seen by the receptive-field recurrence. Pooling
// layers are exempt from the odd-kernel rule (only conv kernels need a
// well-defined center for damping).
struct LayerGeom {
    int k_t = 1;
    int k_f = 1;
    int s_t = 1;
    int s_f = 1;
    bool is_pool = false;
};

struct RFResult {
    int rf_t = 1;
    int rf_f = 1;
    long jump_t = 1;
    long jump_f = 1;
};

// RF_n = RF_{n-1} + (k_n - 1) * J_{n-1},  J_n = J_{n-1} * s_n, per axis.
RFResult max_rf(const std::vector<LayerGeom>& layers);

inline constexpr int kRhoMax = 12;

// Kernel size (3 or 1) for each residual-block conv, in network order. The
// first rho block convs are spatial; rho = 12 makes every block conv spatial.
// The two stem convs are always spatial and are not part of this list.
std::vector<int> rho_to_kernels(int rho, int num_blocks);

}  // namespace rfreg
