#include "sentlab/nn/tensor.hpp"

#include "sentlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace sentlab::nn {

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

} // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(product(shape_), fill) {
    if (shape_.empty() || shape_.size() > 2) throw ShapeError("tensor rank must be 1 or 2");
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_.empty() || shape_.size() > 2) throw ShapeError("tensor rank must be 1 or 2");
    if (data_.size() != product(shape_))
        throw ShapeError("data length " + std::to_string(data_.size()) + " does not match shape " +
                         shape_string());
}

Tensor Tensor::row(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor({1, n}, std::move(values));
}


void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string Tensor::shape_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape_[i]);
    }
    return s + "]";
}

Parameter::Parameter(std::string n, Tensor t)
    : name(std::move(n)), value(std::move(t)), grad(value.shape()), m(value.shape()), v(value.shape()) {}

std::size_t ParameterSet::add(std::string name, Tensor value) {
    params_.emplace_back(std::move(name), std::move(value));
    return params_.size() - 1;
}

std::size_t ParameterSet::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < params_.size(); ++i)
        if (params_[i].name == name) return i;
    throw ConfigError("no parameter named '" + name + "'");
}

void ParameterSet::zero_grad() {
    for (auto& p : params_) p.zero_grad();
}

std::size_t ParameterSet::scalar_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
}

} // namespace sentlab::nn
