// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/specnorm.hpp"

#include <cmath>
#include <string>

namespace abcas::sn {

SpectralLayerState make_state(std::size_t rows, std::uint64_t seed, double m) {
  SpectralLayerState s;
  s.power = linalg::make_power_iter_state(rows, seed);
  set_multiplier(s, m);
  return s;
}

void set_multiplier(SpectralLayerState& state, double m) {
  if (!(m > 0.0 && m <= 1.0)) {
    throw std::invalid_argument("spectral multiplier must lie in (0, 1], got " +
                                std::to_string(m));
  }
  state.m = m;
}

template <typename T>
void refresh(SpectralLayerState& state, const BasicTensor<T>& weight) {
  state.power = linalg::power_iteration_step(linalg::as_matrix(weight), std::move(state.power));
  state.refreshed = true;
  state.degenerate = !(state.power.sigma_hat >= kDivEpsilon);
}

template <typename T>
void rescale_frozen(SpectralLayerState& state, const BasicTensor<T>& weight) {
  if (state.power.v.empty()) throw SpectralNormError("rescale_frozen before first refresh");
  const auto W = linalg::as_matrix(weight);
  double s = 0.0;
  for (std::size_t r = 0; r < W.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < W.cols(); ++c)
      acc += static_cast<double>(W.at(r, c)) * state.power.v[c];
    s += state.power.u[r] * acc;
  }
  state.power.sigma_hat = s;
  state.degenerate = !(s >= kDivEpsilon);
}

template <typename T>
BasicTensor<T> normalized_weight(SpectralLayerState& state, const BasicTensor<T>& weight) {
  if (!state.refreshed) throw SpectralNormError("normalized_weight called before refresh");
  const double sigma = state.power.sigma_hat;
  state.degenerate = !(sigma >= kDivEpsilon);
  if (state.degenerate) return weight;

  const double scale = state.m / sigma;
  BasicTensor<T> out(weight.dims());
  for (std::size_t i = 0; i < weight.size(); ++i) {
    out[i] = static_cast<T>(scale * static_cast<double>(weight[i]));
  }
  return out;
}

template <typename T>
BasicTensor<T> backward_through_norm(const SpectralLayerState& state,
                                     const BasicTensor<T>& weight,
                                     const BasicTensor<T>& grad_wprime) {
  if (grad_wprime.dims() != weight.dims()) {
    throw ShapeError("backward_through_norm: gradient " + shape_string(grad_wprime.dims()) +
                     " vs weight " + shape_string(weight.dims()));
  }
  if (state.degenerate) return grad_wprime;
  if (state.power.v.empty()) throw SpectralNormError("backward_through_norm: missing u/v cache");

  const auto& u = state.power.u;
  const auto& v = state.power.v;
  const std::size_t rows = u.size();
  const std::size_t cols = v.size();
  if (rows * cols != weight.size()) throw SpectralNormError("backward_through_norm: stale cache");

  const double sigma = state.power.sigma_hat;
  const double m = state.m;
  double inner = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    inner += static_cast<double>(grad_wprime[i]) * static_cast<double>(weight[i]);
  }
  const double a = m / sigma;
  const double b = m * inner / (sigma * sigma);

  BasicTensor<T> out(weight.dims());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      out[i] = static_cast<T>(a * static_cast<double>(grad_wprime[i]) - b * u[r] * v[c]);
    }
  }
  return out;
}

#define ABCAS_INSTANTIATE(T)                                                          \
  template void refresh(SpectralLayerState&, const BasicTensor<T>&);                    \
  template void rescale_frozen(SpectralLayerState&, const BasicTensor<T>&);             \
  template BasicTensor<T> normalized_weight(SpectralLayerState&, const BasicTensor<T>&); \
  template BasicTensor<T> backward_through_norm(const SpectralLayerState&,              \
                                                const BasicTensor<T>&, const BasicTensor<T>&);

ABCAS_INSTANTIATE(float)
ABCAS_INSTANTIATE(double)
#undef ABCAS_INSTANTIATE

}  // namespace abcas::sn
