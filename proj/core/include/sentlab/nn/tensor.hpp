#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sentlab::nn {

/// Row-major array of doubles. Rank 1 and rank 2 are the only ranks the ops
/// use; a rank-1 tensor of length n behaves as a 1 x n matrix.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
        return Tensor({rows, cols}, fill);
    }
    static Tensor row(std::vector<double> values);
    static Tensor scalar(double v) { return Tensor({1, 1}, std::vector<double>{v}); }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t rows() const { return shape_.size() == 2 ? shape_[0] : 1; }
    std::size_t cols() const { return shape_.empty() ? 0 : shape_.back(); }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

    void fill(double v);
    bool all_finite() const;
    bool same_shape(const Tensor& other) const { return rows() == other.rows() && cols() == other.cols(); }
    std::string shape_string() const;

    bool operator==(const Tensor& other) const = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// A trainable tensor with its gradient and optimizer state.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor m; // first moment (Adam/AdamW) or squared-gradient sum (Adagrad)
    Tensor v;
    long step = 0;

    Parameter() = default;
    Parameter(std::string n, Tensor t);
    void zero_grad() { grad.fill(0.0); }
};

/// Ordered, name-addressable parameter collection. Blocks refer to their
/// parameters by index so models stay copyable.
class ParameterSet {
public:
    std::size_t add(std::string name, Tensor value);

    Parameter& operator[](std::size_t i) { return params_[i]; }
    const Parameter& operator[](std::size_t i) const { return params_[i]; }
    std::size_t size() const { return params_.size(); }
    std::size_t index_of(const std::string& name) const;

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }

    void zero_grad();
    std::size_t scalar_count() const;

private:
    std::vector<Parameter> params_;
};

} // namespace sentlab::nn
