// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "abcas/tensor.hpp"

namespace abcas::train {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.0;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Apply the RAdam variance-rectification factor (plain Adam when off).
  bool rectify = false;
};

/// First/second moments per parameter tensor, kept in double.
struct OptimizerState {
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
  std::uint64_t step = 0;
};

template <typename T>
using ParamSlot = std::pair<BasicTensor<T>*, const BasicTensor<T>*>;

/// One bias-corrected Adam update over (parameter, gradient) pairs.
template <typename T>
void optimizer_step(std::span<const ParamSlot<T>> slots, OptimizerState& state,
                    const AdamConfig& config);

/// RAdam rectification factor at step t, or 0 when the variance estimate is
/// not yet tractable (rho_t <= 4).
double radam_rectification(double beta2, std::uint64_t t);

}  // namespace abcas::train
