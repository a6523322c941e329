// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/optimizer.hpp"

#include <cmath>

namespace abcas::train {

double radam_rectification(double beta2, std::uint64_t t) {
  const double rho_inf = 2.0 / (1.0 - beta2) - 1.0;
  const double b2t = std::pow(beta2, static_cast<double>(t));
  const double rho_t = rho_inf - 2.0 * static_cast<double>(t) * b2t / (1.0 - b2t);
  if (!(rho_t > 4.0)) return 0.0;
  return std::sqrt((rho_t - 4.0) * (rho_t - 2.0) * rho_inf /
                   ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
}

template <typename T>
void optimizer_step(std::span<const ParamSlot<T>> slots, OptimizerState& state,
                    const AdamConfig& config) {
  if (state.first.empty()) {
    for (const auto& [param, grad] : slots) {
      state.first.emplace_back(param->size(), 0.0);
      state.second.emplace_back(param->size(), 0.0);
    }
  }
  if (state.first.size() != slots.size()) {
    throw ShapeError("optimizer state tracks " + std::to_string(state.first.size()) +
                     " tensors, got " + std::to_string(slots.size()));
  }

  const std::uint64_t t = ++state.step;
  const double b1 = config.beta1, b2 = config.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t));
  const double rect = config.rectify ? radam_rectification(b2, t) : 1.0;

  for (std::size_t s = 0; s < slots.size(); ++s) {
    auto& param = *slots[s].first;
    const auto& grad = *slots[s].second;
    auto& m = state.first[s];
    auto& v = state.second[s];
    if (grad.size() != param.size() || m.size() != param.size()) {
      throw ShapeError("optimizer: gradient/moment shape does not mirror parameter " +
                       shape_string(param.dims()));
    }
    for (std::size_t i = 0; i < param.size(); ++i) {
      const double g = grad[i];
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      const double mhat = m[i] / bc1;
      double update;
      if (config.rectify && rect == 0.0) {
        update = config.lr * mhat;
      } else {
        const double vhat = v[i] / bc2;
        update = config.lr * rect * mhat / (std::sqrt(vhat) + config.eps);
      }
      param[i] = static_cast<T>(param[i] - update);
    }
  }
}

template void optimizer_step(std::span<const ParamSlot<float>>, OptimizerState&, const AdamConfig&);
template void optimizer_step(std::span<const ParamSlot<double>>, OptimizerState&,
                             const AdamConfig&);

}  // namespace abcas::train
