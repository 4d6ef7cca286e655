#include "sigmove/nn/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "sigmove/error.hpp"

namespace sigmove::nn {

namespace {

void check_shape(const Tensor::Shape& shape) {
  if (shape.empty() || shape.size() > 3) throw UsageError("tensor rank must be 1, 2 or 3");
  for (auto d : shape)
    if (d == 0) throw UsageError("tensor dimensions must be positive");
}

}  // namespace

std::size_t shape_product(const Tensor::Shape& shape) noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(shape_product(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (shape_product(shape_) != data_.size()) throw UsageError("tensor data does not match shape");
}

void Tensor::resize(const Shape& shape) {
  check_shape(shape);
  shape_ = shape;
  data_.resize(shape_product(shape_));
}

Tensor Tensor::reshaped(Shape shape) const& { return Tensor(std::move(shape), data_); }

Tensor Tensor::reshaped(Shape shape) && { return Tensor(std::move(shape), std::move(data_)); }

bool Tensor::all_finite() const noexcept {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace sigmove::nn
