#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfreg {

struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct StateError : std::runtime_error {
    explicit StateError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dense row-major float32 tensor with an optional gradient buffer.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<int> shape, bool requires_grad = false)
        : shape_(std::move(shape)), requires_grad_(requires_grad) {
        for (int d : shape_) {
            if (d <= 0) throw DimensionError("tensor dimension must be positive, got " + std::to_string(d));
        }
        data_.assign(numel(), 0.0f);
        if (requires_grad_) grad_.assign(numel(), 0.0f);
    }

    static Tensor full(std::vector<int> shape, float value, bool requires_grad = false) {
        Tensor t(std::move(shape), requires_grad);
        std::fill(t.data_.begin(), t.data_.end(), value);
        return t;
    }

    const std::vector<int>& shape() const { return shape_; }
    int ndim() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_.at(static_cast<std::size_t>(i)); }

    std::size_t numel() const {
        return static_cast<std::size_t>(std::accumulate(shape_.begin(), shape_.end(), 1L, std::multiplies<long>()));
    }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    float& at(std::size_t i) { return data_[i]; }
    float at(std::size_t i) const { return data_[i]; }

    bool requires_grad() const { return requires_grad_; }
    void set_requires_grad(bool rg) {
        requires_grad_ = rg;
        if (rg && grad_.size() != data_.size()) grad_.assign(data_.size(), 0.0f);
    }

    bool has_grad() const { return !grad_.empty(); }
    float* grad() {
        if (grad_.empty()) throw StateError("tensor has no gradient buffer");
        return grad_.data();
    }
    const float* grad() const {
        if (grad_.empty()) throw StateError("tensor has no gradient buffer");
        return grad_.data();
    }
    void zero_grad() { std::fill(grad_.begin(), grad_.end(), 0.0f); }

    bool all_finite() const;
    std::string shape_str() const;

private:
    std::vector<int> shape_;
    std::vector<float> data_;
    std::vector<float> grad_;
    bool requires_grad_ = false;
};

using TensorPtr = std::shared_ptr<Tensor>;

inline TensorPtr make_tensor(std::vector<int> shape, bool requires_grad = false) {
    return std::make_shared<Tensor>(std::move(shape), requires_grad);
}

inline void check_same_shape(const Tensor& a, const Tensor& b, const char* where) {
    if (a.shape() != b.shape())
        throw DimensionError(std::string(where) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

// Reverse-mode tape. Ops append a closure; backward() runs them last to first.
class Tape {
public:
    void record(std::function<void()> fn) { nodes_.push_back(std::move(fn)); }

    void backward() {
        for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
    }

    void clear() { nodes_.clear(); }
    std::size_t size() const { return nodes_.size(); }

private:
    std::vector<std::function<void()>> nodes_;
};

}  // namespace rfreg
