// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>

#include "abcas/linalg.hpp"
#include "abcas/tensor.hpp"

namespace abcas::sn {

/// Estimates below this are treated as a degenerate (zero) weight.
inline constexpr double kDivEpsilon = 1e-12;

class SpectralNormError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Per-layer state for W' = m * W / sigma_hat(W). The base weight itself lives
/// in the owning network's parameter store.
struct SpectralLayerState {
  linalg::PowerIterState power;
  double m = 1.0;
  // Set when sigma_hat < kDivEpsilon; W is then passed through unscaled.
  bool degenerate = false;
  bool refreshed = false;
};

SpectralLayerState make_state(std::size_t rows, std::uint64_t seed, double m = 1.0);

/// Throws std::invalid_argument unless m is in (0, 1].
void set_multiplier(SpectralLayerState& state, double m);

/// One power-iteration step on the matrix view of `weight`.
template <typename T>
void refresh(SpectralLayerState& state, const BasicTensor<T>& weight);

/// Recomputes sigma_hat = u^T W v from the cached u, v without advancing the
/// iteration. This is the function whose gradient backward_through_norm gives.
template <typename T>
void rescale_frozen(SpectralLayerState& state, const BasicTensor<T>& weight);

/// W' = m * W / sigma_hat, same shape as `weight`. Requires a prior refresh.
template <typename T>
BasicTensor<T> normalized_weight(SpectralLayerState& state, const BasicTensor<T>& weight);

/// Maps dL/dW' to dL/dW holding u, v constant:
///   dL/dW = (m / s) G - (m / s^2) <G, W> u v^T,  s = sigma_hat.
template <typename T>
BasicTensor<T> backward_through_norm(const SpectralLayerState& state,
                                     const BasicTensor<T>& weight,
                                     const BasicTensor<T>& grad_wprime);

}  // namespace abcas::sn
