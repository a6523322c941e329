// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "abcas/tensor.hpp"

namespace abcas::linalg {

/// Persistent left/right singular-vector estimates for one weight matrix.
/// `u` has length rows(W) and unit norm; `v` is the right vector cached by the
/// most recent step (empty until the first step).
struct PowerIterState {
  std::vector<double> u;
  std::vector<double> v;
  double sigma_hat = 0.0;
};

/// u drawn from N(0, 1) with the given seed and normalized.
PowerIterState make_power_iter_state(std::size_t rows, std::uint64_t seed);

/// One full update: v = normalize(W^T u), u' = normalize(W v),
/// sigma_hat = u'^T W v. Accumulation is in double regardless of T.
/// A zero intermediate vector leaves u unchanged and sets sigma_hat = 0.
template <typename T>
PowerIterState power_iteration_step(const BasicTensor<T>& W, PowerIterState state);

/// Runs `steps` updates; convenience for tests and converged estimates.
template <typename T>
PowerIterState power_iterate(const BasicTensor<T>& W, PowerIterState state, int steps);

/// Kernel (c_out, c_in, kh, kw) viewed as the (c_out, c_in*kh*kw) matrix.
template <typename T>
BasicTensor<T> reshape_conv_weight(const BasicTensor<T>& kernel);

/// Any weight tensor viewed as (dim0, rest); rank-2 input is returned as is.
template <typename T>
BasicTensor<T> as_matrix(const BasicTensor<T>& weight);

// Exact reference path (cyclic Jacobi). Kept separate from the power
// iteration so the two can cross-check each other.

/// Largest Gram dimension accepted by the exact solvers (64 x 64).
inline constexpr std::size_t kExactGramLimit = 4096;

/// Eigenvalues of the symmetric n x n matrix `a` (row-major), descending.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n);

/// All singular values of W in descending order.
template <typename T>
std::vector<double> singular_values_exact(const BasicTensor<T>& W);

/// Largest singular value of W to ~1e-12 relative accuracy. Throws
/// std::length_error when min(rows, cols)^2 exceeds kExactGramLimit.
template <typename T>
double spectral_norm_exact(const BasicTensor<T>& W);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace abcas::linalg
