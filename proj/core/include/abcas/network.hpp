// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "abcas/layers.hpp"
#include "abcas/specnorm.hpp"
#include "abcas/tensor.hpp"

namespace abcas::nn {

/// Declarative architecture: per-sample input shape plus a layer list.
/// With `spectral_norm` set, every dense/conv/convt weight is replaced by
/// m * W / sigma_hat(W) in the forward pass.
struct NetworkSpec {
  Shape input;
  std::vector<LayerSpec> layers;
  bool spectral_norm = false;
};

class TapeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

template <typename T>
struct LayerParams {
  BasicTensor<T> weight;
  BasicTensor<T> bias;
  BasicTensor<T> grad_weight;
  BasicTensor<T> grad_bias;
};

template <typename T>
struct ParamStore {
  std::vector<LayerParams<T>> layers;

  void zero_grad() {
    for (auto& l : layers) {
      l.grad_weight.fill(T{0});
      l.grad_bias.fill(T{0});
    }
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
  }

  /// Parameters and their gradients in a stable order (weight, bias per layer).
  std::vector<std::pair<BasicTensor<T>*, const BasicTensor<T>*>> slots() {
    std::vector<std::pair<BasicTensor<T>*, const BasicTensor<T>*>> out;
    for (auto& l : layers) {
      if (!l.weight.empty()) out.emplace_back(&l.weight, &l.grad_weight);
      if (!l.bias.empty()) out.emplace_back(&l.bias, &l.grad_bias);
    }
    return out;
  }
};

/// Intermediates recorded by one forward pass. Single use.
template <typename T>
struct ActivationTape {
  std::vector<BasicTensor<T>> inputs;   // input to each layer
  std::vector<std::vector<T>> stats;    // normalization statistics
  Shape output_dims;
  std::uint64_t weight_version = 0;
  bool consumed = false;
};

template <typename T>
class Network {
 public:
  /// Weights ~ N(0, 0.02), biases 0, layernorm gain 1; all seeded.
  Network(NetworkSpec spec, std::uint64_t seed);

  const NetworkSpec& spec() const noexcept { return spec_; }
  const Shape& input_shape() const noexcept { return spec_.input; }
  const Shape& output_shape() const noexcept { return shapes_.back(); }
  std::size_t num_layers() const noexcept { return spec_.layers.size(); }

  ParamStore<T>& params() noexcept { return params_; }
  const ParamStore<T>& params() const noexcept { return params_; }

  bool spectral() const noexcept { return spec_.spectral_norm; }
  const sn::SpectralLayerState* spectral_state(std::size_t layer) const;
  std::vector<const sn::SpectralLayerState*> spectral_states() const;

  /// One power-iteration step per normalized layer, then rebuilds the
  /// effective weights with multiplier m. No-op for plain networks.
  void refresh_spectral(double m);

  /// Rebuilds effective weights from the current parameters with u, v frozen
  /// (sigma_hat = u^T W v). Used to probe the exact function the backward
  /// pass differentiates.
  void reapply_spectral(double m);

  /// Weight the forward pass actually uses for `layer`.
  const BasicTensor<T>& effective_weight(std::size_t layer) const;

  std::pair<BasicTensor<T>, ActivationTape<T>> forward(const BasicTensor<T>& x) const;

  /// Forward without recording a tape.
  BasicTensor<T> predict(const BasicTensor<T>& x) const;

  /// Back-propagates `grad_out`, accumulating parameter gradients when
  /// `accumulate_params` is set, and returns dL/dx.
  BasicTensor<T> backward(ActivationTape<T>& tape, const BasicTensor<T>& grad_out,
                          bool accumulate_params = true);

 private:
  BasicTensor<T> run(const BasicTensor<T>& x, ActivationTape<T>* tape) const;
  void rebuild_effective();

  NetworkSpec spec_;
  std::vector<Shape> shapes_;  // shapes_[i] is the input of layer i; back() the output
  ParamStore<T> params_;
  std::vector<std::optional<sn::SpectralLayerState>> spectral_;
  std::vector<BasicTensor<T>> effective_;
  std::uint64_t weight_version_ = 0;
  bool spectral_ready_ = false;
};

extern template class Network<float>;
extern template class Network<double>;

/// Flat concatenation of every parameter, in ParamStore::slots order.
template <typename T>
std::vector<T> flatten_parameters(Network<T>& net);
template <typename T>
void load_parameters(Network<T>& net, std::span<const T> flat);

}  // namespace abcas::nn
