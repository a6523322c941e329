// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense row-major n-dimensional array. The training path uses Tensor (float);
// the controller, gradient checks and test oracles use Tensor64.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace abcas {

using Shape = std::vector<std::size_t>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of elements described by `dims`; 0 for an empty shape.
inline std::size_t shape_size(const Shape& dims) {
  if (dims.empty()) return 0;
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

inline std::string shape_string(const Shape& dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(dims[i]);
  }
  return s + ")";
}

template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;

  explicit BasicTensor(Shape dims, T fill = T{0})
      : dims_(std::move(dims)), data_(checked_size(dims_), fill) {}

  BasicTensor(Shape dims, std::vector<T> data)
      : dims_(std::move(dims)), data_(std::move(data)) {
    if (checked_size(dims_) != data_.size()) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match dims " + shape_string(dims_));
    }
  }

  const Shape& dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t i) const { return dims_.at(i); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t rows() const { return require_rank(2), dims_[0]; }
  std::size_t cols() const { return require_rank(2), dims_[1]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  std::vector<T>& storage() noexcept { return data_; }
  const std::vector<T>& storage() const noexcept { return data_; }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  T& at(std::size_t r, std::size_t c) noexcept { return data_[r * dims_[1] + c]; }
  const T& at(std::size_t r, std::size_t c) const noexcept {
    return data_[r * dims_[1] + c];
  }

  /// Elements per leading-axis slice (one sample of a batch).
  std::size_t stride0() const { return dims_.empty() ? 0 : data_.size() / dims_[0]; }

  BasicTensor reshaped(Shape dims) const& { return BasicTensor(std::move(dims), data_); }
  BasicTensor reshaped(Shape dims) && {
    return BasicTensor(std::move(dims), std::move(data_));
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](T x) { return std::isfinite(x); });
  }

  void check_finite(std::string_view what) const {
    if (!all_finite()) {
      throw NonFiniteError("non-finite value in " + std::string(what));
    }
  }

  template <typename U>
  BasicTensor<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return BasicTensor<U>(dims_, std::move(out));
  }

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

 private:
  static std::size_t checked_size(const Shape& dims) {
    for (auto d : dims) {
      if (d == 0) throw ShapeError("tensor extents must be positive: " + shape_string(dims));
    }
    return shape_size(dims);
  }

  void require_rank(std::size_t r) const {
    if (dims_.size() != r) {
      throw ShapeError("expected rank " + std::to_string(r) + ", got " +
                       shape_string(dims_));
    }
  }

  Shape dims_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using Tensor64 = BasicTensor<double>;

}  // namespace abcas
