#include "rfreg/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "rfreg/threading.hpp"

namespace rfreg {

bool Tensor::all_finite() const {
    for (float v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) os << (i ? "," : "") << shape_[i];
    os << "]";
    return os.str();
}

ConvLayer make_conv(int c_in, int c_out, int k_t, int k_f, Conv2dParams params) {
    if (k_t <= 0 || k_f <= 0 || k_t % 2 == 0 || k_f % 2 == 0)
        throw ValidationError("conv kernel sizes must be odd positive, got " + std::to_string(k_t) + "x" +
                              std::to_string(k_f));
    ConvLayer layer;
    layer.weight = make_tensor({c_out, c_in, k_t, k_f}, true);
    layer.bias = make_tensor({c_out}, true);
    layer.params = params;
    return layer;
}

std::pair<int, int> conv2d_output_dims(int in_t, int in_f, int k_t, int k_f, const Conv2dParams& p) {
    int out_t = (in_t + 2 * p.pad_t - k_t) / p.stride_t + 1;
    int out_f = (in_f + 2 * p.pad_f - k_f) / p.stride_f + 1;
    if (out_t <= 0 || out_f <= 0)
        throw DimensionError("conv input " + std::to_string(in_t) + "x" + std::to_string(in_f) +
                             " smaller than kernel " + std::to_string(k_t) + "x" + std::to_string(k_f) +
                             " after padding");
    return {out_t, out_f};
}

namespace {

// One output row, accumulating over (ci, kh, kw) in a fixed order. Every
// kernel variant funnels through this so serial and omp results are bitwise
// identical.
inline void conv_row(const float* x, int c_in, int t, int f, const float* w, int k_t, int k_f,
                     const Conv2dParams& p, int co, int oh, int out_f, float bias_val, float* yrow) {
    for (int ow = 0; ow < out_f; ++ow) yrow[ow] = bias_val;
    for (int ci = 0; ci < c_in; ++ci) {
        const float* xc = x + static_cast<std::size_t>(ci) * t * f;
        const float* wc = w + (static_cast<std::size_t>(co) * c_in + ci) * k_t * k_f;
        for (int kh = 0; kh < k_t; ++kh) {
            int ih = oh * p.stride_t - p.pad_t + kh;
            if (ih < 0 || ih >= t) continue;
            const float* xrow = xc + static_cast<std::size_t>(ih) * f;
            for (int kw = 0; kw < k_f; ++kw) {
                float wv = wc[kh * k_f + kw];
                // valid ow range: 0 <= ow*stride_f - pad_f + kw < f
                int lo = 0, off = p.pad_f - kw;
                if (off > 0) lo = (off + p.stride_f - 1) / p.stride_f;
                int hi = out_f;
                // ow*stride_f < f + off
                int lim = (f + off - 1) / p.stride_f + 1;
                if (lim < hi) hi = lim;
                for (int ow = lo; ow < hi; ++ow) yrow[ow] += wv * xrow[ow * p.stride_f - off];
            }
        }
    }
}

}  // namespace

void conv2d_forward_serial(const float* x, int n, int c_in, int t, int f, const float* w, const float* b,
                           int c_out, int k_t, int k_f, const Conv2dParams& p, float* y) {
    auto [out_t, out_f] = conv2d_output_dims(t, f, k_t, k_f, p);
    for (int in = 0; in < n; ++in)
        for (int co = 0; co < c_out; ++co)
            for (int oh = 0; oh < out_t; ++oh) {
                float* yrow = y + ((static_cast<std::size_t>(in) * c_out + co) * out_t + oh) * out_f;
                conv_row(x + static_cast<std::size_t>(in) * c_in * t * f, c_in, t, f, w, k_t, k_f, p, co, oh,
                         out_f, b ? b[co] : 0.0f, yrow);
            }
}

void conv2d_forward_omp(const float* x, int n, int c_in, int t, int f, const float* w, const float* b,
                        int c_out, int k_t, int k_f, const Conv2dParams& p, float* y) {
    auto [out_t, out_f] = conv2d_output_dims(t, f, k_t, k_f, p);
#pragma omp parallel for collapse(2) schedule(static)
    for (int in = 0; in < n; ++in)
        for (int co = 0; co < c_out; ++co)
            for (int oh = 0; oh < out_t; ++oh) {
                float* yrow = y + ((static_cast<std::size_t>(in) * c_out + co) * out_t + oh) * out_f;
                conv_row(x + static_cast<std::size_t>(in) * c_in * t * f, c_in, t, f, w, k_t, k_f, p, co, oh,
                         out_f, b ? b[co] : 0.0f, yrow);
            }
}

namespace {

// grad wrt input for one sample; contribution order over (co, oh, ow) fixed.
inline void conv_bwd_input_sample(const float* w, int c_in, int t, int f, int c_out, int k_t, int k_f,
                                  const Conv2dParams& p, const float* gy, int out_t, int out_f, float* gx) {
    for (int co = 0; co < c_out; ++co)
        for (int oh = 0; oh < out_t; ++oh)
            for (int ow = 0; ow < out_f; ++ow) {
                float g = gy[(static_cast<std::size_t>(co) * out_t + oh) * out_f + ow];
                if (g == 0.0f) continue;
                for (int ci = 0; ci < c_in; ++ci) {
                    const float* wc = w + (static_cast<std::size_t>(co) * c_in + ci) * k_t * k_f;
                    float* gxc = gx + static_cast<std::size_t>(ci) * t * f;
                    for (int kh = 0; kh < k_t; ++kh) {
                        int ih = oh * p.stride_t - p.pad_t + kh;
                        if (ih < 0 || ih >= t) continue;
                        for (int kw = 0; kw < k_f; ++kw) {
                            int iw = ow * p.stride_f - p.pad_f + kw;
                            if (iw < 0 || iw >= f) continue;
                            gxc[static_cast<std::size_t>(ih) * f + iw] += g * wc[kh * k_f + kw];
                        }
                    }
                }
            }
}

// grad wrt weight/bias for one output channel; accumulation order over
// (n, oh, ow) fixed.
inline void conv_bwd_weight_channel(const float* x, int n, int c_in, int t, int f, int k_t, int k_f,
                                    const Conv2dParams& p, const float* gy, int c_out, int out_t, int out_f,
                                    int co, float* gw, float* gb) {
    for (int in = 0; in < n; ++in) {
        const float* xs = x + static_cast<std::size_t>(in) * c_in * t * f;
        const float* gys = gy + ((static_cast<std::size_t>(in) * c_out + co)) * out_t * out_f;
        for (int oh = 0; oh < out_t; ++oh)
            for (int ow = 0; ow < out_f; ++ow) {
                float g = gys[static_cast<std::size_t>(oh) * out_f + ow];
                if (gb) gb[co] += g;
                if (g == 0.0f || !gw) continue;
                for (int ci = 0; ci < c_in; ++ci) {
                    const float* xc = xs + static_cast<std::size_t>(ci) * t * f;
                    float* gwc = gw + (static_cast<std::size_t>(co) * c_in + ci) * k_t * k_f;
                    for (int kh = 0; kh < k_t; ++kh) {
                        int ih = oh * p.stride_t - p.pad_t + kh;
                        if (ih < 0 || ih >= t) continue;
                        for (int kw = 0; kw < k_f; ++kw) {
                            int iw = ow * p.stride_f - p.pad_f + kw;
                            if (iw < 0 || iw >= f) continue;
                            gwc[kh * k_f + kw] += g * xc[static_cast<std::size_t>(ih) * f + iw];
                        }
                    }
                }
            }
    }
}

}  // namespace

void conv2d_backward_serial(const float* x, int n, int c_in, int t, int f, const float* w, int c_out, int k_t,
                            int k_f, const Conv2dParams& p, const float* gy, float* gx, float* gw, float* gb) {
    auto [out_t, out_f] = conv2d_output_dims(t, f, k_t, k_f, p);
    if (gx)
        for (int in = 0; in < n; ++in)
            conv_bwd_input_sample(w, c_in, t, f, c_out, k_t, k_f, p,
                                  gy + static_cast<std::size_t>(in) * c_out * out_t * out_f, out_t, out_f,
                                  gx + static_cast<std::size_t>(in) * c_in * t * f);
    if (gw || gb)
        for (int co = 0; co < c_out; ++co)
            conv_bwd_weight_channel(x, n, c_in, t, f, k_t, k_f, p, gy, c_out, out_t, out_f, co, gw, gb);
}

void conv2d_backward_omp(const float* x, int n, int c_in, int t, int f, const float* w, int c_out, int k_t,
                         int k_f, const Conv2dParams& p, const float* gy, float* gx, float* gw, float* gb) {
    auto [out_t, out_f] = conv2d_output_dims(t, f, k_t, k_f, p);
    if (gx) {
#pragma omp parallel for schedule(static)
        for (int in = 0; in < n; ++in)
            conv_bwd_input_sample(w, c_in, t, f, c_out, k_t, k_f, p,
                                  gy + static_cast<std::size_t>(in) * c_out * out_t * out_f, out_t, out_f,
                                  gx + static_cast<std::size_t>(in) * c_in * t * f);
    }
    if (gw || gb) {
#pragma omp parallel for schedule(static)
        for (int co = 0; co < c_out; ++co)
            conv_bwd_weight_channel(x, n, c_in, t, f, k_t, k_f, p, gy, c_out, out_t, out_f, co, gw, gb);
    }
}

TensorPtr conv2d(Tape* tape, const TensorPtr& x, const ConvLayer& layer) {
    if (x->ndim() != 4)
        throw DimensionError("conv2d expects a 4-d input, got " + x->shape_str());
    if (x->dim(1) != layer.c_in())
        throw DimensionError("conv2d channel mismatch: input " + x->shape_str() + " vs weight " +
                             layer.weight->shape_str());
    int n = x->dim(0), t = x->dim(2), f = x->dim(3);
    auto [out_t, out_f] = conv2d_output_dims(t, f, layer.k_t(), layer.k_f(), layer.params);
    auto y = make_tensor({n, layer.c_out(), out_t, out_f}, true);

    if (parallel_enabled())
        conv2d_forward_omp(x->data(), n, layer.c_in(), t, f, layer.weight->data(), layer.bias->data(),
                           layer.c_out(), layer.k_t(), layer.k_f(), layer.params, y->data());
    else
        conv2d_forward_serial(x->data(), n, layer.c_in(), t, f, layer.weight->data(), layer.bias->data(),
                              layer.c_out(), layer.k_t(), layer.k_f(), layer.params, y->data());

    if (tape) {
        TensorPtr xs = x;
        TensorPtr w = layer.weight, b = layer.bias;
        Conv2dParams p = layer.params;
        tape->record([xs, w, b, p, y, n, t, f]() {
            int c_in = w->dim(1), c_out = w->dim(0), k_t = w->dim(2), k_f = w->dim(3);
            float* gx = xs->has_grad() ? xs->grad() : nullptr;
            if (parallel_enabled())
                conv2d_backward_omp(xs->data(), n, c_in, t, f, w->data(), c_out, k_t, k_f, p, y->grad(), gx,
                                    w->grad(), b->grad());
            else
                conv2d_backward_serial(xs->data(), n, c_in, t, f, w->data(), c_out, k_t, k_f, p, y->grad(), gx,
                                       w->grad(), b->grad());
        });
    }
    return y;
}

TensorPtr relu(Tape* tape, const TensorPtr& x) {
    auto y = make_tensor(x->shape(), true);
    std::size_t sz = x->numel();
    for (std::size_t i = 0; i < sz; ++i) y->at(i) = x->at(i) > 0.0f ? x->at(i) : 0.0f;
    if (tape) {
        TensorPtr xs = x;
        tape->record([xs, y, sz]() {
            if (!xs->has_grad()) return;
            for (std::size_t i = 0; i < sz; ++i)
                if (xs->at(i) > 0.0f) xs->grad()[i] += y->grad()[i];
        });
    }
    return y;
}

TensorPtr add(Tape* tape, const TensorPtr& a, const TensorPtr& b) {
    check_same_shape(*a, *b, "add");
    auto y = make_tensor(a->shape(), true);
    std::size_t sz = a->numel();
    for (std::size_t i = 0; i < sz; ++i) y->at(i) = a->at(i) + b->at(i);
    if (tape) {
        TensorPtr as = a, bs = b;
        tape->record([as, bs, y, sz]() {
            if (as->has_grad())
                for (std::size_t i = 0; i < sz; ++i) as->grad()[i] += y->grad()[i];
            if (bs->has_grad())
                for (std::size_t i = 0; i < sz; ++i) bs->grad()[i] += y->grad()[i];
        });
    }
    return y;
}

namespace {

TensorPtr pool2d_impl(Tape* tape, const TensorPtr& x, int k, int stride, bool is_max) {
    if (x->ndim() != 4) throw DimensionError("pool2d expects a 4-d input, got " + x->shape_str());
    int n = x->dim(0), c = x->dim(1), t = x->dim(2), f = x->dim(3);
    if (t < k || f < k) throw DimensionError("pool2d input " + x->shape_str() + " smaller than window");
    int out_t = (t - k) / stride + 1, out_f = (f - k) / stride + 1;
    auto y = make_tensor({n, c, out_t, out_f}, true);
    auto argmax = is_max ? std::make_shared<std::vector<int>>(y->numel()) : nullptr;

    std::size_t yi = 0;
    for (int in = 0; in < n; ++in)
        for (int ic = 0; ic < c; ++ic) {
            const float* xc = x->data() + (static_cast<std::size_t>(in) * c + ic) * t * f;
            for (int oh = 0; oh < out_t; ++oh)
                for (int ow = 0; ow < out_f; ++ow, ++yi) {
                    if (is_max) {
                        int best = (oh * stride) * f + ow * stride;
                        float bv = xc[best];
                        for (int kh = 0; kh < k; ++kh)
                            for (int kw = 0; kw < k; ++kw) {
                                int idx = (oh * stride + kh) * f + ow * stride + kw;
                                if (xc[idx] > bv) { bv = xc[idx]; best = idx; }
                            }
                        y->at(yi) = bv;
                        (*argmax)[yi] = best;
                    } else {
                        float s = 0.0f;
                        for (int kh = 0; kh < k; ++kh)
                            for (int kw = 0; kw < k; ++kw)
                                s += xc[(oh * stride + kh) * f + ow * stride + kw];
                        y->at(yi) = s / static_cast<float>(k * k);
                    }
                }
        }

    if (tape) {
        TensorPtr xs = x;
        tape->record([xs, y, argmax, n, c, t, f, out_t, out_f, k, stride, is_max]() {
            if (!xs->has_grad()) return;
            std::size_t yi = 0;
            float inv = 1.0f / static_cast<float>(k * k);
            for (int in = 0; in < n; ++in)
                for (int ic = 0; ic < c; ++ic) {
                    float* gxc = xs->grad() + (static_cast<std::size_t>(in) * c + ic) * t * f;
                    for (int oh = 0; oh < out_t; ++oh)
                        for (int ow = 0; ow < out_f; ++ow, ++yi) {
                            float g = y->grad()[yi];
                            if (is_max)
                                gxc[(*argmax)[yi]] += g;
                            else
                                for (int kh = 0; kh < k; ++kh)
                                    for (int kw = 0; kw < k; ++kw)
                                        gxc[(oh * stride + kh) * f + ow * stride + kw] += g * inv;
                        }
                }
        });
    }
    return y;
}

}  // namespace

TensorPtr max_pool2d(Tape* tape, const TensorPtr& x, int k, int stride) {
    return pool2d_impl(tape, x, k, stride, true);
}

TensorPtr avg_pool2d(Tape* tape, const TensorPtr& x, int k, int stride) {
    return pool2d_impl(tape, x, k, stride, false);
}

TensorPtr global_avg_pool(Tape* tape, const TensorPtr& x) {
    if (x->ndim() != 4) throw DimensionError("global_avg_pool expects a 4-d input, got " + x->shape_str());
    int n = x->dim(0), c = x->dim(1), t = x->dim(2), f = x->dim(3);
    auto y = make_tensor({n, c}, true);
    float inv = 1.0f / static_cast<float>(t * f);
    for (int in = 0; in < n; ++in)
        for (int ic = 0; ic < c; ++ic) {
            const float* xc = x->data() + (static_cast<std::size_t>(in) * c + ic) * t * f;
            float s = 0.0f;
            for (int i = 0; i < t * f; ++i) s += xc[i];
            y->at(static_cast<std::size_t>(in) * c + ic) = s * inv;
        }
    if (tape) {
        TensorPtr xs = x;
        tape->record([xs, y, n, c, t, f, inv]() {
            if (!xs->has_grad()) return;
            for (int in = 0; in < n; ++in)
                for (int ic = 0; ic < c; ++ic) {
                    float g = y->grad()[static_cast<std::size_t>(in) * c + ic] * inv;
                    float* gxc = xs->grad() + (static_cast<std::size_t>(in) * c + ic) * t * f;
                    for (int i = 0; i < t * f; ++i) gxc[i] += g;
                }
        });
    }
    return y;
}

TensorPtr linear(Tape* tape, const TensorPtr& x, const TensorPtr& w, const TensorPtr& b) {
    if (x->ndim() != 2 || w->ndim() != 2 || x->dim(1) != w->dim(1))
        throw DimensionError("linear shape mismatch: x " + x->shape_str() + " w " + w->shape_str());
    int n = x->dim(0), c = x->dim(1), k = w->dim(0);
    auto y = make_tensor({n, k}, true);
    for (int in = 0; in < n; ++in)
        for (int ik = 0; ik < k; ++ik) {
            float s = b->at(ik);
            const float* xr = x->data() + static_cast<std::size_t>(in) * c;
            const float* wr = w->data() + static_cast<std::size_t>(ik) * c;
            for (int ic = 0; ic < c; ++ic) s += xr[ic] * wr[ic];
            y->at(static_cast<std::size_t>(in) * k + ik) = s;
        }
    if (tape) {
        TensorPtr xs = x, ws = w, bs = b;
        tape->record([xs, ws, bs, y, n, c, k]() {
            for (int in = 0; in < n; ++in)
                for (int ik = 0; ik < k; ++ik) {
                    float g = y->grad()[static_cast<std::size_t>(in) * k + ik];
                    bs->grad()[ik] += g;
                    const float* xr = xs->data() + static_cast<std::size_t>(in) * c;
                    float* gwr = ws->grad() + static_cast<std::size_t>(ik) * c;
                    for (int ic = 0; ic < c; ++ic) gwr[ic] += g * xr[ic];
                    if (xs->has_grad()) {
                        const float* wr = ws->data() + static_cast<std::size_t>(ik) * c;
                        float* gxr = xs->grad() + static_cast<std::size_t>(in) * c;
                        for (int ic = 0; ic < c; ++ic) gxr[ic] += g * wr[ic];
                    }
                }
        });
    }
    return y;
}

BatchNorm make_batchnorm(int channels) {
    BatchNorm bn;
    bn.gamma = make_tensor({channels}, true);
    bn.beta = make_tensor({channels}, true);
    std::fill(bn.gamma->data(), bn.gamma->data() + channels, 1.0f);
    bn.running_mean.assign(channels, 0.0f);
    bn.running_var.assign(channels, 1.0f);
    return bn;
}

TensorPtr batchnorm2d(Tape* tape, const TensorPtr& x, BatchNorm& bn, bool train) {
    if (x->ndim() != 4) throw DimensionError("batchnorm2d expects a 4-d input, got " + x->shape_str());
    int n = x->dim(0), c = x->dim(1), t = x->dim(2), f = x->dim(3);
    if (c != static_cast<int>(bn.running_mean.size()))
        throw DimensionError("batchnorm2d channel mismatch: input " + x->shape_str() + " vs stats " +
                             std::to_string(bn.running_mean.size()));
    auto y = make_tensor({n, c, t, f}, true);
    std::size_t plane = static_cast<std::size_t>(t) * f;
    float m = static_cast<float>(n) * plane;

    auto mean = std::make_shared<std::vector<float>>(c);
    auto inv_std = std::make_shared<std::vector<float>>(c);
    auto x_hat = train ? std::make_shared<std::vector<float>>(x->numel()) : nullptr;

    for (int ic = 0; ic < c; ++ic) {
        float mu, var;
        if (train) {
            double s = 0.0;
            for (int in = 0; in < n; ++in) {
                const float* xc = x->data() + (static_cast<std::size_t>(in) * c + ic) * plane;
                for (std::size_t i = 0; i < plane; ++i) s += xc[i];
            }
            mu = static_cast<float>(s / m);
            double v = 0.0;
            for (int in = 0; in < n; ++in) {
                const float* xc = x->data() + (static_cast<std::size_t>(in) * c + ic) * plane;
                for (std::size_t i = 0; i < plane; ++i) {
                    double d = xc[i] - mu;
                    v += d * d;
                }
            }
            var = static_cast<float>(v / m);
            bn.running_mean[ic] = (1.0f - bn.momentum) * bn.running_mean[ic] + bn.momentum * mu;
            bn.running_var[ic] = (1.0f - bn.momentum) * bn.running_var[ic] + bn.momentum * var;
        } else {
            mu = bn.running_mean[ic];
            var = bn.running_var[ic];
        }
        (*mean)[ic] = mu;
        (*inv_std)[ic] = 1.0f / std::sqrt(var + bn.eps);
        float g = bn.gamma->at(ic), bt = bn.beta->at(ic), is = (*inv_std)[ic];
        for (int in = 0; in < n; ++in) {
            std::size_t base = (static_cast<std::size_t>(in) * c + ic) * plane;
            for (std::size_t i = 0; i < plane; ++i) {
                float xh = (x->at(base + i) - mu) * is;
                if (x_hat) (*x_hat)[base + i] = xh;
                y->at(base + i) = g * xh + bt;
            }
        }
    }

    if (tape) {
        TensorPtr xs = x, gamma = bn.gamma, beta = bn.beta;
        tape->record([xs, gamma, beta, y, mean, inv_std, x_hat, n, c, plane, m, train]() {
            for (int ic = 0; ic < c; ++ic) {
                double sum_dy = 0.0, sum_dy_xh = 0.0;
                for (int in = 0; in < n; ++in) {
                    std::size_t base = (static_cast<std::size_t>(in) * c + ic) * plane;
                    for (std::size_t i = 0; i < plane; ++i) {
                        float dy = y->grad()[base + i];
                        sum_dy += dy;
                        if (train) sum_dy_xh += dy * (*x_hat)[base + i];
                    }
                }
                float g = gamma->at(ic), is = (*inv_std)[ic];
                if (train) {
                    gamma->grad()[ic] += static_cast<float>(sum_dy_xh);
                    beta->grad()[ic] += static_cast<float>(sum_dy);
                    if (!xs->has_grad()) continue;
                    float k1 = static_cast<float>(sum_dy) / m, k2 = static_cast<float>(sum_dy_xh) / m;
                    for (int in = 0; in < n; ++in) {
                        std::size_t base = (static_cast<std::size_t>(in) * c + ic) * plane;
                        for (std::size_t i = 0; i < plane; ++i)
                            xs->grad()[base + i] +=
                                g * is * (y->grad()[base + i] - k1 - (*x_hat)[base + i] * k2);
                    }
                } else {
                    float mu = (*mean)[ic];
                    double sum_dy_xh_eval = 0.0;
                    for (int in = 0; in < n; ++in) {
                        std::size_t base = (static_cast<std::size_t>(in) * c + ic) * plane;
                        for (std::size_t i = 0; i < plane; ++i) {
                            float dy = y->grad()[base + i];
                            sum_dy_xh_eval += dy * (xs->at(base + i) - mu) * is;
                            if (xs->has_grad()) xs->grad()[base + i] += dy * g * is;
                        }
                    }
                    gamma->grad()[ic] += static_cast<float>(sum_dy_xh_eval);
                    beta->grad()[ic] += static_cast<float>(sum_dy);
                }
            }
        });
    }
    return y;
}

TensorPtr softmax_cross_entropy(Tape* tape, const TensorPtr& logits, const std::vector<int>& labels) {
    if (logits->ndim() != 2 || logits->dim(0) != static_cast<int>(labels.size()))
        throw DimensionError("softmax_cross_entropy: logits " + logits->shape_str() + " vs " +
                             std::to_string(labels.size()) + " labels");
    int n = logits->dim(0), k = logits->dim(1);
    auto probs = std::make_shared<std::vector<float>>(logits->numel());
    double total = 0.0;
    for (int in = 0; in < n; ++in) {
        const float* row = logits->data() + static_cast<std::size_t>(in) * k;
        float mx = row[0];
        for (int i = 1; i < k; ++i) mx = std::max(mx, row[i]);
        double denom = 0.0;
        for (int i = 0; i < k; ++i) denom += std::exp(static_cast<double>(row[i] - mx));
        for (int i = 0; i < k; ++i)
            (*probs)[static_cast<std::size_t>(in) * k + i] =
                static_cast<float>(std::exp(static_cast<double>(row[i] - mx)) / denom);
        int lab = labels[in];
        if (lab < 0 || lab >= k) throw ValidationError("label " + std::to_string(lab) + " out of range");
        total += -std::log(std::max(1e-30, static_cast<double>((*probs)[static_cast<std::size_t>(in) * k + lab])));
    }
    auto loss = make_tensor({1}, true);
    loss->at(0) = static_cast<float>(total / n);

    if (tape) {
        TensorPtr ls = logits;
        auto labs = labels;
        tape->record([ls, loss, probs, labs, n, k]() {
            if (!ls->has_grad()) return;
            float gl = loss->grad()[0] / static_cast<float>(n);
            for (int in = 0; in < n; ++in)
                for (int i = 0; i < k; ++i) {
                    float p = (*probs)[static_cast<std::size_t>(in) * k + i];
                    float onehot = (i == labs[in]) ? 1.0f : 0.0f;
                    ls->grad()[static_cast<std::size_t>(in) * k + i] += gl * (p - onehot);
                }
        });
    }
    return loss;
}

int argmax_row(const Tensor& logits, int row) {
    int k = logits.dim(1);
    const float* r = logits.data() + static_cast<std::size_t>(row) * k;
    int best = 0;
    for (int i = 1; i < k; ++i)
        if (r[i] > r[best]) best = i;
    return best;
}

void SgdOptimizer::step(const std::vector<ParamRef>& params, float lr) {
    if (velocity_.size() < params.size()) velocity_.resize(params.size());
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor& t = *params[pi].tensor;
        if (!t.has_grad()) continue;
        auto& v = velocity_[pi];
        if (v.size() != t.numel()) v.assign(t.numel(), 0.0f);
        float* d = t.data();
        const float* g = t.grad();
        for (std::size_t i = 0; i < t.numel(); ++i) {
            if (!std::isfinite(g[i]))
                throw StateError("non-finite gradient in parameter '" + params[pi].name + "' at index " +
                                 std::to_string(i));
            float gi = g[i] + weight_decay_ * d[i];
            v[i] = momentum_ * v[i] + gi;
            d[i] -= lr * v[i];
        }
    }
}

}  // namespace rfreg
