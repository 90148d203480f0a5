#pragma once

#include <utility>
#include <vector>

#include "rfreg/tensor.hpp"

namespace rfreg {

struct Conv2dParams {
    int stride_t = 1;
    int stride_f = 1;
    int pad_t = 0;
    int pad_f = 0;
};

// Convolution layer: weight [C_out, C_in, k_t, k_f], bias [C_out].
// Convolution is cross-correlation (no kernel flip).
struct ConvLayer {
    TensorPtr weight;
    TensorPtr bias;
    Conv2dParams params;

    int c_out() const { return weight->dim(0); }
    int c_in() const { return weight->dim(1); }
    int k_t() const { return weight->dim(2); }
    int k_f() const { return weight->dim(3); }
    std::size_t parameter_count() const { return weight->numel() + bias->numel(); }
};

ConvLayer make_conv(int c_in, int c_out, int k_t, int k_f, Conv2dParams params = {});

std::pair<int, int> conv2d_output_dims(int in_t, int in_f, int k_t, int k_f, const Conv2dParams& p);

// Raw kernels. x [N,C_in,T,F], w [C_out,C_in,k_t,k_f], b [C_out], y [N,C_out,T',F'].
// The serial variants are the reference implementation; the omp variants
// parallelize over independent output slices and accumulate each element in
// the same order, so both produce bitwise-identical results.
void conv2d_forward_serial(const float* x, int n, int c_in, int t, int f,
                           const float* w, const float* b, int c_out, int k_t, int k_f,
                           const Conv2dParams& p, float* y);
void conv2d_forward_omp(const float* x, int n, int c_in, int t, int f,
                        const float* w, const float* b, int c_out, int k_t, int k_f,
                        const Conv2dParams& p, float* y);

void conv2d_backward_serial(const float* x, int n, int c_in, int t, int f,
                            const float* w, int c_out, int k_t, int k_f,
                            const Conv2dParams& p, const float* gy,
                            float* gx, float* gw, float* gb);
void conv2d_backward_omp(const float* x, int n, int c_in, int t, int f,
                         const float* w, int c_out, int k_t, int k_f,
                         const Conv2dParams& p, const float* gy,
                         float* gx, float* gw, float* gb);

// Autograd ops. Passing tape == nullptr runs forward only.
TensorPtr conv2d(Tape* tape, const TensorPtr& x, const ConvLayer& layer);
TensorPtr relu(Tape* tape, const TensorPtr& x);
TensorPtr add(Tape* tape, const TensorPtr& a, const TensorPtr& b);
TensorPtr max_pool2d(Tape* tape, const TensorPtr& x, int k, int stride);
TensorPtr avg_pool2d(Tape* tape, const TensorPtr& x, int k, int stride);
TensorPtr global_avg_pool(Tape* tape, const TensorPtr& x);  // [N,C,T,F] -> [N,C]
TensorPtr linear(Tape* tape, const TensorPtr& x, const TensorPtr& w, const TensorPtr& b);  // [N,C]x[K,C]->[N,K]

struct BatchNorm {
    TensorPtr gamma;  // [C]
    TensorPtr beta;   // [C]
    std::vector<float> running_mean;
    std::vector<float> running_var;
    float eps = 1e-5f;
    float momentum = 0.1f;
};

BatchNorm make_batchnorm(int channels);
TensorPtr batchnorm2d(Tape* tape, const TensorPtr& x, BatchNorm& bn, bool train);

// Mean cross-entropy over the batch; returns a scalar tensor (shape [1]).
TensorPtr softmax_cross_entropy(Tape* tape, const TensorPtr& logits, const std::vector<int>& labels);
int argmax_row(const Tensor& logits, int row);

struct ParamRef {
    std::string name;
    TensorPtr tensor;
    bool prunable = false;  // conv / linear weights only
};

// Momentum SGD with weight decay. Velocity buffers are keyed by position in
// the parameter list, which must stay stable across steps.
class SgdOptimizer {
public:
    SgdOptimizer(float momentum, float weight_decay) : momentum_(momentum), weight_decay_(weight_decay) {}
    void step(const std::vector<ParamRef>& params, float lr);

private:
    float momentum_;
    float weight_decay_;
    std::vector<std::vector<float>> velocity_;
};

}  // namespace rfreg
