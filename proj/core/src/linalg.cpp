// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/linalg.hpp"

#include <cmath>
#include <random>

namespace abcas::linalg {

namespace {

// Returns false (and leaves `x` alone) when the vector has zero norm.
bool normalize_in_place(std::vector<double>& x) {
  const double n = norm2(x);
  if (!(n > 0.0) || !std::isfinite(n)) return false;
  for (auto& e : x) e /= n;
  return true;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

PowerIterState make_power_iter_state(std::size_t rows, std::uint64_t seed) {
  if (rows == 0) throw ShapeError("power iteration needs at least one row");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PowerIterState s;
  s.u.resize(rows);
  do {
    for (auto& e : s.u) e = normal(rng);
  } while (!normalize_in_place(s.u));
  return s;
}

template <typename T>
PowerIterState power_iteration_step(const BasicTensor<T>& W, PowerIterState state) {
  const std::size_t rows = W.rows();
  const std::size_t cols = W.cols();
  if (state.u.size() != rows) {
    throw ShapeError("power iteration: u has length " + std::to_string(state.u.size()) +
                     " but W is " + shape_string(W.dims()));
  }

  std::vector<double> v(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double ur = state.u[r];
    const T* row = &W.at(r, 0);
    for (std::size_t c = 0; c < cols; ++c) v[c] += static_cast<double>(row[c]) * ur;
  }
  if (!normalize_in_place(v)) {
    state.sigma_hat = 0.0;
    return state;
  }

  std::vector<double> wv(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = &W.at(r, 0);
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += static_cast<double>(row[c]) * v[c];
    wv[r] = acc;
  }
  std::vector<double> u = wv;
  if (!normalize_in_place(u)) {
    state.sigma_hat = 0.0;
    return state;
  }
  state.sigma_hat = std::max(0.0, dot(u, wv));
  state.u = std::move(u);
  state.v = std::move(v);
  return state;
}

template <typename T>
PowerIterState power_iterate(const BasicTensor<T>& W, PowerIterState state, int steps) {
  for (int i = 0; i < steps; ++i) state = power_iteration_step(W, std::move(state));
  return state;
}

template <typename T>
BasicTensor<T> reshape_conv_weight(const BasicTensor<T>& kernel) {
  if (kernel.rank() != 4) {
    throw ShapeError("reshape_conv_weight expects a rank-4 kernel, got " +
                     shape_string(kernel.dims()));
  }
  const auto& d = kernel.dims();
  return kernel.reshaped({d[0], d[1] * d[2] * d[3]});
}

template <typename T>
BasicTensor<T> as_matrix(const BasicTensor<T>& weight) {
  if (weight.rank() == 2) return weight;
  if (weight.rank() == 4) return reshape_conv_weight(weight);
  if (weight.rank() < 2) {
    throw ShapeError("weight of rank " + std::to_string(weight.rank()) +
                     " has no matrix view");
  }
  return weight.reshaped({weight.dim(0), weight.size() / weight.dim(0)});
}

#define ABCAS_INSTANTIATE(T)                                                        \
  template PowerIterState power_iteration_step(const BasicTensor<T>&, PowerIterState); \
  template PowerIterState power_iterate(const BasicTensor<T>&, PowerIterState, int);   \
  template BasicTensor<T> reshape_conv_weight(const BasicTensor<T>&);                  \
  template BasicTensor<T> as_matrix(const BasicTensor<T>&);

ABCAS_INSTANTIATE(float)
ABCAS_INSTANTIATE(double)
#undef ABCAS_INSTANTIATE

}  // namespace abcas::linalg
