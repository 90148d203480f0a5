#include "rfreg/rf.hpp"

#include <algorithm>
#include <string>

namespace rfreg {

RFResult max_rf(const std::vector<LayerGeom>& layers) {
    if (layers.empty()) throw ValidationError("max_rf: empty layer list");
    RFResult r;
    for (const auto& l : layers) {
        if (l.k_t < 1 || l.k_f < 1) throw ValidationError("max_rf: kernel sizes must be >= 1");
        if (l.s_t < 1 || l.s_f < 1) throw ValidationError("max_rf: strides must be >= 1");
        if (!l.is_pool && (l.k_t % 2 == 0 || l.k_f % 2 == 0))
            throw ValidationError("max_rf: even conv kernel " + std::to_string(l.k_t) + "x" +
                                  std::to_string(l.k_f));
        r.rf_t += (l.k_t - 1) * static_cast<int>(r.jump_t);
        r.rf_f += (l.k_f - 1) * static_cast<int>(r.jump_f);
        r.jump_t *= l.s_t;
        r.jump_f *= l.s_f;
    }
    return r;
}

std::vector<int> rho_to_kernels(int rho, int num_blocks) {
    if (rho < 0 || rho > kRhoMax)
        throw ValidationError("rho must be in 0..=" + std::to_string(kRhoMax) + ", got " + std::to_string(rho));
    if (num_blocks < 1) throw ValidationError("num_blocks must be >= 1");
    int total = num_blocks * 2;
    int spatial = (rho == kRhoMax) ? total : std::min(rho, total);
    std::vector<int> kernels(total, 1);
    std::fill(kernels.begin(), kernels.begin() + spatial, 3);
    return kernels;
}

}  // namespace rfreg
