#include "rfreg/erf.hpp"

#include <cmath>
#include <iostream>

namespace rfreg {

namespace {

// Grow a window from the peak, taking the larger neighbour first, until the
// requested energy fraction is inside.
int profile_width(const std::vector<double>& profile, int peak, double fraction) {
    double total = 0.0;
    for (double v : profile) total += v;
    if (total <= 0.0) return 0;
    int lo = peak, hi = peak;
    double inside = profile[peak];
    int n = static_cast<int>(profile.size());
    while (inside < fraction * total) {
        double left = lo > 0 ? profile[lo - 1] : -1.0;
        double right = hi < n - 1 ? profile[hi + 1] : -1.0;
        if (left < 0.0 && right < 0.0) break;
        if (left >= right)
            inside += profile[--lo];
        else
            inside += profile[++hi];
    }
    return hi - lo + 1;
}

}  // namespace

ErfReport measure_erf(Network& net, const TensorPtr& input_batch, float energy_fraction) {
    if (input_batch->ndim() != 4)
        throw DimensionError("measure_erf expects a 4-d input batch, got " + input_batch->shape_str());
    int n = input_batch->dim(0), c = input_batch->dim(1);
    int t = input_batch->dim(2), f = input_batch->dim(3);

    ErfReport report;
    report.t = t;
    report.f = f;
    report.energy_fraction = energy_fraction;

    RFResult rf = max_rf(net.geometry());
    if (rf.rf_t > t || rf.rf_f > f) {
        report.clipped = true;
        std::cerr << "warning: theoretical RF " << rf.rf_t << "x" << rf.rf_f << " exceeds input " << t << "x"
                  << f << "; ERF measurement is clipped\n";
    }

    input_batch->set_requires_grad(true);
    input_batch->zero_grad();
    Tape tape;
    for (auto& p : net.params) p.tensor->zero_grad();
    net.forward(&tape, input_batch, false);

    auto& feat = *net.last_feature;
    int ft = feat.dim(2), ff = feat.dim(3), fc = feat.dim(1);
    int ct = ft / 2, cf = ff / 2;
    feat.zero_grad();
    for (int in = 0; in < n; ++in)
        for (int ic = 0; ic < fc; ++ic)
            feat.grad()[((static_cast<std::size_t>(in) * fc + ic) * ft + ct) * ff + cf] = 1.0f;
    tape.backward();

    report.energy_map.assign(static_cast<std::size_t>(t) * f, 0.0f);
    float inv = 1.0f / static_cast<float>(n * c);
    for (int in = 0; in < n; ++in)
        for (int ic = 0; ic < c; ++ic) {
            const float* g = input_batch->grad() + (static_cast<std::size_t>(in) * c + ic) * t * f;
            for (int i = 0; i < t * f; ++i) report.energy_map[i] += std::fabs(g[i]) * inv;
        }

    std::size_t best = 0;
    for (std::size_t i = 1; i < report.energy_map.size(); ++i)
        if (report.energy_map[i] > report.energy_map[best]) best = i;
    report.argmax_t = static_cast<int>(best) / f;
    report.argmax_f = static_cast<int>(best) % f;

    std::vector<double> marg_t(t, 0.0), marg_f(f, 0.0);
    for (int it = 0; it < t; ++it)
        for (int jf = 0; jf < f; ++jf) {
            marg_t[it] += report.at(it, jf);
            marg_f[jf] += report.at(it, jf);
        }
    report.width_t = profile_width(marg_t, report.argmax_t, energy_fraction);
    report.width_f = profile_width(marg_f, report.argmax_f, energy_fraction);
    return report;
}

std::pair<int, int> support_extent(const ErfReport& report) {
    int t_lo = report.t, t_hi = -1, f_lo = report.f, f_hi = -1;
    for (int it = 0; it < report.t; ++it)
        for (int jf = 0; jf < report.f; ++jf)
            if (report.at(it, jf) > 0.0f) {
                t_lo = std::min(t_lo, it);
                t_hi = std::max(t_hi, it);
                f_lo = std::min(f_lo, jf);
                f_hi = std::max(f_hi, jf);
            }
    if (t_hi < 0) return {0, 0};
    return {t_hi - t_lo + 1, f_hi - f_lo + 1};
}

}  // namespace rfreg
