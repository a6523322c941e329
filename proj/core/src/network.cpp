// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/network.hpp"

#include <string>

#include "abcas/random.hpp"

namespace abcas::nn {

namespace {

std::string layer_label(std::size_t i, const LayerSpec& spec) {
  return "layer " + std::to_string(i) + " (" + format_layer(spec) + ")";
}

inline constexpr double kInitStddev = 0.02;

}  // namespace

template <typename T>
Network<T>::Network(NetworkSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  if (spec_.input.empty() || shape_size(spec_.input) == 0) {
    throw ShapeError("network input shape must be non-empty");
  }
  if (spec_.layers.empty()) throw ShapeError("network has no layers");

  shapes_.push_back(spec_.input);
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    shapes_.push_back(
        infer_output_shape(spec_.layers[i], shapes_.back(), layer_label(i, spec_.layers[i])));
  }

  Rng rng(derive_seed(seed, 0));
  params_.layers.resize(spec_.layers.size());
  spectral_.resize(spec_.layers.size());
  effective_.resize(spec_.layers.size());
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    const auto& l = spec_.layers[i];
    if (!l.has_weight()) continue;
    auto& p = params_.layers[i];
    const Shape ws = weight_shape(l, shapes_[i]);
    const Shape bs = bias_shape(l, shapes_[i]);
    if (l.kind == LayerKind::layernorm) {
      p.weight = BasicTensor<T>(ws, T{1});
    } else {
      p.weight = normal_tensor<T>(ws, rng, 0.0, kInitStddev);
    }
    p.bias = BasicTensor<T>(bs);
    p.grad_weight = BasicTensor<T>(ws);
    p.grad_bias = BasicTensor<T>(bs);
    if (spec_.spectral_norm && l.is_linear()) {
      spectral_[i] = sn::make_state(ws[0], derive_seed(seed, 1000 + i));
    }
  }
}

template <typename T>
const sn::SpectralLayerState* Network<T>::spectral_state(std::size_t layer) const {
  const auto& s = spectral_.at(layer);
  return s ? &*s : nullptr;
}

template <typename T>
std::vector<const sn::SpectralLayerState*> Network<T>::spectral_states() const {
  std::vector<const sn::SpectralLayerState*> out;
  for (const auto& s : spectral_)
    if (s) out.push_back(&*s);
  return out;
}

template <typename T>
void Network<T>::rebuild_effective() {
  for (std::size_t i = 0; i < spectral_.size(); ++i) {
    if (spectral_[i]) effective_[i] = sn::normalized_weight(*spectral_[i], params_.layers[i].weight);
  }
  ++weight_version_;
  spectral_ready_ = true;
}

template <typename T>
void Network<T>::refresh_spectral(double m) {
  if (!spec_.spectral_norm) return;
  for (std::size_t i = 0; i < spectral_.size(); ++i) {
    if (!spectral_[i]) continue;
    sn::set_multiplier(*spectral_[i], m);
    sn::refresh(*spectral_[i], params_.layers[i].weight);
  }
  rebuild_effective();
}

template <typename T>
void Network<T>::reapply_spectral(double m) {
  if (!spec_.spectral_norm) return;
  for (std::size_t i = 0; i < spectral_.size(); ++i) {
    if (!spectral_[i]) continue;
    sn::set_multiplier(*spectral_[i], m);
    sn::rescale_frozen(*spectral_[i], params_.layers[i].weight);
  }
  rebuild_effective();
}

template <typename T>
const BasicTensor<T>& Network<T>::effective_weight(std::size_t layer) const {
  if (spectral_.at(layer)) {
    if (!spectral_ready_) {
      throw sn::SpectralNormError("spectrally normalized network used before refresh_spectral");
    }
    return effective_[layer];
  }
  return params_.layers[layer].weight;
}

template <typename T>
BasicTensor<T> Network<T>::run(const BasicTensor<T>& x, ActivationTape<T>* tape) const {
  Shape expected{x.rank() ? x.dim(0) : 0};
  expected.insert(expected.end(), spec_.input.begin(), spec_.input.end());
  if (x.dims() != expected) {
    throw ShapeError(layer_label(0, spec_.layers[0]) + ": input " + shape_string(x.dims()) +
                     " does not match network input " + shape_string(spec_.input));
  }
  if (tape) {
    tape->inputs.clear();
    tape->stats.assign(spec_.layers.size(), {});
    tape->weight_version = weight_version_;
    tape->consumed = false;
  }

  BasicTensor<T> cur = x;
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    const auto& l = spec_.layers[i];
    const auto& p = params_.layers[i];
    std::vector<T>* stats = tape ? &tape->stats[i] : nullptr;
    BasicTensor<T> next;
    try {
      switch (l.kind) {
        case LayerKind::dense:
          next = dense_forward(cur, effective_weight(i), p.bias);
          break;
        case LayerKind::conv2d:
          next = conv2d_forward(cur, effective_weight(i), p.bias, l.stride, l.padding);
          break;
        case LayerKind::convtranspose2d:
          next = conv_transpose2d_forward(cur, effective_weight(i), p.bias, l.stride, l.padding);
          break;
        case LayerKind::lrelu:
          next = lrelu_forward(cur, l.slope);
          break;
        case LayerKind::relu:
          next = relu_forward(cur);
          break;
        case LayerKind::tanh:
          next = tanh_forward(cur);
          break;
        case LayerKind::layernorm:
          next = layernorm_forward(cur, p.weight, p.bias, stats);
          break;
        case LayerKind::pixelnorm:
          next = pixelnorm_forward(cur, stats);
          break;
      }
    } catch (const ShapeError& e) {
      throw ShapeError(layer_label(i, l) + ": " + e.what());
    }
    if (tape) tape->inputs.push_back(std::move(cur));
    cur = std::move(next);
  }
  if (tape) tape->output_dims = cur.dims();
  return cur;
}

template <typename T>
std::pair<BasicTensor<T>, ActivationTape<T>> Network<T>::forward(const BasicTensor<T>& x) const {
  ActivationTape<T> tape;
  auto y = run(x, &tape);
  return {std::move(y), std::move(tape)};
}

template <typename T>
BasicTensor<T> Network<T>::predict(const BasicTensor<T>& x) const {
  return run(x, nullptr);
}

template <typename T>
BasicTensor<T> Network<T>::backward(ActivationTape<T>& tape, const BasicTensor<T>& grad_out,
                                    bool accumulate_params) {
  if (tape.consumed) throw TapeError("activation tape already consumed by a backward pass");
  if (tape.inputs.size() != spec_.layers.size()) throw TapeError("tape does not belong to this network");
  if (tape.weight_version != weight_version_) {
    throw TapeError("effective weights changed between forward and backward");
  }
  if (grad_out.dims() != tape.output_dims) {
    throw ShapeError("backward: gradient " + shape_string(grad_out.dims()) +
                     " does not match forward output " + shape_string(tape.output_dims));
  }
  tape.consumed = true;

  BasicTensor<T> g = grad_out;
  for (std::size_t i = spec_.layers.size(); i-- > 0;) {
    const auto& l = spec_.layers[i];
    auto& p = params_.layers[i];
    const BasicTensor<T>& x = tape.inputs[i];
    BasicTensor<T> dx;

    // Linear layers under spectral norm produce dL/dW' first, then map it back.
    BasicTensor<T> dw_prime;
    BasicTensor<T>* dW = nullptr;
    BasicTensor<T>* db = accumulate_params ? &p.grad_bias : nullptr;
    if (accumulate_params && l.has_weight()) {
      if (spectral_[i]) {
        dw_prime = BasicTensor<T>(p.weight.dims());
        dW = &dw_prime;
      } else {
        dW = &p.grad_weight;
      }
    }

    switch (l.kind) {
      case LayerKind::dense:
        dense_backward(x, effective_weight(i), g, dW, db, &dx);
        break;
      case LayerKind::conv2d:
        conv2d_backward(x, effective_weight(i), g, l.stride, l.padding, dW, db, &dx);
        break;
      case LayerKind::convtranspose2d:
        conv_transpose2d_backward(x, effective_weight(i), g, l.stride, l.padding, dW, db, &dx);
        break;
      case LayerKind::lrelu:
        dx = lrelu_backward(x, g, l.slope);
        break;
      case LayerKind::relu:
        dx = relu_backward(x, g);
        break;
      case LayerKind::tanh:
        dx = tanh_backward(tanh_forward(x), g);
        break;
      case LayerKind::layernorm:
        layernorm_backward(x, p.weight, tape.stats[i], g, dW, db, &dx);
        break;
      case LayerKind::pixelnorm:
        dx = pixelnorm_backward(x, tape.stats[i], g);
        break;
    }

    if (spectral_[i] && dW == &dw_prime) {
      auto dw = sn::backward_through_norm(*spectral_[i], p.weight, dw_prime);
      for (std::size_t k = 0; k < dw.size(); ++k) p.grad_weight[k] += dw[k];
    }
    g = std::move(dx);
  }
  tape.inputs.clear();
  return g;
}

template class Network<float>;
template class Network<double>;

template <typename T>
std::vector<T> flatten_parameters(Network<T>& net) {
  std::vector<T> flat;
  flat.reserve(net.params().parameter_count());
  for (auto [param, grad] : net.params().slots()) {
    (void)grad;
    flat.insert(flat.end(), param->data().begin(), param->data().end());
  }
  return flat;
}

template <typename T>
void load_parameters(Network<T>& net, std::span<const T> flat) {
  if (flat.size() != net.params().parameter_count()) {
    throw ShapeError("parameter blob has " + std::to_string(flat.size()) + " values, network needs " +
                     std::to_string(net.params().parameter_count()));
  }
  std::size_t off = 0;
  for (auto [param, grad] : net.params().slots()) {
    (void)grad;
    std::copy_n(flat.begin() + off, param->size(), param->data().begin());
    off += param->size();
  }
}

template std::vector<float> flatten_parameters(Network<float>&);
template std::vector<double> flatten_parameters(Network<double>&);
template void load_parameters(Network<float>&, std::span<const float>);
template void load_parameters(Network<double>&, std::span<const double>);

}  // namespace abcas::nn
