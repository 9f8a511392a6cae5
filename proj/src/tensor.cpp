#include "aoilab/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "aoilab/errors.hpp"

namespace aoilab::nn {
namespace {
std::size_t product(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
    if (data_.size() != product(shape_)) {
        throw DimensionError("tensor value count " + std::to_string(data_.size()) + " does not match shape " +
                             shape_string());
    }
}

double Tensor::item() const {
    if (data_.size() != 1) {
        throw DimensionError("item() on non-scalar tensor " + shape_string());
    }
    return data_[0];
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

std::string Tensor::shape_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i) {
            s += "x";
        }
        s += std::to_string(shape_[i]);
    }
    return s + "]";
}

}  // namespace aoilab::nn
