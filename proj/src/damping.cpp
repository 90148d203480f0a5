#include "rfreg/damping.hpp"

#include <cmath>

#include "rfreg/threading.hpp"

namespace rfreg {

DampAxis damp_axis_from_string(const std::string& s) {
    if (s == "frequency") return DampAxis::frequency;
    if (s == "time") return DampAxis::time;
    if (s == "both") return DampAxis::both;
    throw ValidationError("unknown damping axis '" + s + "' (expected frequency|time|both)");
}

std::string to_string(DampAxis axis) {
    switch (axis) {
        case DampAxis::frequency: return "frequency";
        case DampAxis::time: return "time";
        default: return "both";
    }
}

namespace {

// 1 - (1 - lambda) * d / d_max at offset d from center; 1 everywhere for k = 1.
float profile_value(int idx, int k, float lambda) {
    int d_max = (k - 1) / 2;
    if (d_max == 0) return 1.0f;
    int d = std::abs(idx - d_max);
    return 1.0f - (1.0f - lambda) * static_cast<float>(d) / static_cast<float>(d_max);
}

}  // namespace

DampingMatrix build_damping_matrix(int k_t, int k_f, const DampingSpec& spec) {
    if (k_t < 1 || k_f < 1 || k_t % 2 == 0 || k_f % 2 == 0)
        throw ValidationError("damping matrix needs odd kernel sizes, got " + std::to_string(k_t) + "x" +
                              std::to_string(k_f));
    if (!(spec.lambda > 0.0f && spec.lambda <= 1.0f))
        throw ValidationError("damping lambda must be in (0, 1], got " + std::to_string(spec.lambda));
    DampingMatrix m;
    m.k_t = k_t;
    m.k_f = k_f;
    m.values.resize(static_cast<std::size_t>(k_t) * k_f);
    bool damp_t = spec.axis == DampAxis::time || spec.axis == DampAxis::both;
    bool damp_f = spec.axis == DampAxis::frequency || spec.axis == DampAxis::both;
    for (int h = 0; h < k_t; ++h)
        for (int w = 0; w < k_f; ++w) {
            float v = 1.0f;
            if (damp_t) v *= profile_value(h, k_t, spec.lambda);
            if (damp_f) v *= profile_value(w, k_f, spec.lambda);
            m.values[static_cast<std::size_t>(h) * k_f + w] = v;
        }
    return m;
}

TensorPtr damped_conv2d(Tape* tape, const TensorPtr& x, const ConvLayer& layer, const DampingMatrix& C) {
    if (C.k_t != layer.k_t() || C.k_f != layer.k_f())
        throw DimensionError("damping matrix " + std::to_string(C.k_t) + "x" + std::to_string(C.k_f) +
                             " does not match kernel " + std::to_string(layer.k_t()) + "x" +
                             std::to_string(layer.k_f()));
    if (x->dim(1) != layer.c_in())
        throw DimensionError("damped_conv2d channel mismatch: input " + x->shape_str() + " vs weight " +
                             layer.weight->shape_str());

    int spatial = C.k_t * C.k_f;
    auto w_eff = make_tensor(layer.weight->shape(), false);
    std::size_t filters = layer.weight->numel() / spatial;
    for (std::size_t fidx = 0; fidx < filters; ++fidx)
        for (int i = 0; i < spatial; ++i)
            w_eff->at(fidx * spatial + i) = layer.weight->at(fidx * spatial + i) * C.values[i];

    int n = x->dim(0), t = x->dim(2), f = x->dim(3);
    auto [out_t, out_f] = conv2d_output_dims(t, f, layer.k_t(), layer.k_f(), layer.params);
    auto y = make_tensor({n, layer.c_out(), out_t, out_f}, true);
    if (parallel_enabled())
        conv2d_forward_omp(x->data(), n, layer.c_in(), t, f, w_eff->data(), layer.bias->data(), layer.c_out(),
                           layer.k_t(), layer.k_f(), layer.params, y->data());
    else
        conv2d_forward_serial(x->data(), n, layer.c_in(), t, f, w_eff->data(), layer.bias->data(),
                              layer.c_out(), layer.k_t(), layer.k_f(), layer.params, y->data());

    if (tape) {
        TensorPtr xs = x, w = layer.weight, b = layer.bias;
        Conv2dParams p = layer.params;
        auto damp = C.values;
        tape->record([xs, w, b, w_eff, y, p, damp, n, t, f, spatial]() {
            int c_in = w->dim(1), c_out = w->dim(0), k_t = w->dim(2), k_f = w->dim(3);
            float* gx = xs->has_grad() ? xs->grad() : nullptr;
            std::vector<float> gw_eff(w->numel(), 0.0f);
            if (parallel_enabled())
                conv2d_backward_omp(xs->data(), n, c_in, t, f, w_eff->data(), c_out, k_t, k_f, p, y->grad(),
                                    gx, gw_eff.data(), b->grad());
            else
                conv2d_backward_serial(xs->data(), n, c_in, t, f, w_eff->data(), c_out, k_t, k_f, p,
                                       y->grad(), gx, gw_eff.data(), b->grad());
            std::size_t filters = w->numel() / spatial;
            for (std::size_t fidx = 0; fidx < filters; ++fidx)
                for (int i = 0; i < spatial; ++i)
                    w->grad()[fidx * spatial + i] += gw_eff[fidx * spatial + i] * damp[i];
        });
    }
    return y;
}

}  // namespace rfreg
