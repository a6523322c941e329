// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0
//
// Cyclic Jacobi eigen-solver for small symmetric matrices. Used as the exact
// reference for singular values; no code is shared with the power iteration.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "abcas/linalg.hpp"

namespace abcas::linalg {

std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) throw ShapeError("symmetric_eigenvalues: size mismatch");
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

  double frob = 0.0;
  for (double x : a) frob += x * x;
  frob = std::sqrt(frob);

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (std::sqrt(off) <= 1e-15 * frob) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double tau = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return eig;
}

template <typename T>
std::vector<double> singular_values_exact(const BasicTensor<T>& W) {
  const std::size_t rows = W.rows();
  const std::size_t cols = W.cols();
  const std::size_t n = std::min(rows, cols);
  if (n * n > kExactGramLimit) {
    throw std::length_error("exact singular values limited to Gram size " +
                            std::to_string(kExactGramLimit) + ", got " +
                            shape_string(W.dims()));
  }

  // Gram of the smaller side: W W^T when rows <= cols, else W^T W.
  std::vector<double> gram(n * n, 0.0);
  const bool left = rows <= cols;
  const std::size_t inner = left ? cols : rows;
  auto elem = [&](std::size_t outer, std::size_t k) {
    return static_cast<double>(left ? W.at(outer, k) : W.at(k, outer));
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < inner; ++k) s += elem(i, k) * elem(j, k);
      gram[i * n + j] = s;
      gram[j * n + i] = s;
    }
  }

  auto eig = symmetric_eigenvalues(std::move(gram), n);
  for (auto& e : eig) e = std::sqrt(std::max(e, 0.0));
  return eig;
}

template <typename T>
double spectral_norm_exact(const BasicTensor<T>& W) {
  return singular_values_exact(W).front();
}

template std::vector<double> singular_values_exact(const BasicTensor<float>&);
template std::vector<double> singular_values_exact(const BasicTensor<double>&);
template double spectral_norm_exact(const BasicTensor<float>&);
template double spectral_norm_exact(const BasicTensor<double>&);

}  // namespace abcas::linalg
