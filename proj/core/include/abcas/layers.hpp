// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0
//
// Layer descriptions and batched forward/backward kernels. All kernels take
// a batch tensor whose leading axis is the sample index.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abcas/tensor.hpp"

namespace abcas::nn {

enum class LayerKind { dense, conv2d, convtranspose2d, lrelu, relu, tanh, layernorm, pixelnorm };

inline constexpr double kLayerNormEps = 1e-5;
inline constexpr double kPixelNormEps = 1e-8;

struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  std::size_t out = 0;  // output features (dense) or channels (conv)
  std::size_t kernel = 4;
  std::size_t stride = 1;
  std::size_t padding = 0;
  double slope = 0.2;  // lrelu only

  static LayerSpec dense(std::size_t out) { return {LayerKind::dense, out}; }
  static LayerSpec conv(std::size_t out, std::size_t k, std::size_t s, std::size_t p) {
    return {LayerKind::conv2d, out, k, s, p};
  }
  static LayerSpec convt(std::size_t out, std::size_t k, std::size_t s, std::size_t p) {
    return {LayerKind::convtranspose2d, out, k, s, p};
  }
  static LayerSpec lrelu(double slope) { return {LayerKind::lrelu, 0, 4, 1, 0, slope}; }
  static LayerSpec relu() { return {LayerKind::relu}; }
  static LayerSpec tanh() { return {LayerKind::tanh}; }
  static LayerSpec layernorm() { return {LayerKind::layernorm}; }
  static LayerSpec pixelnorm() { return {LayerKind::pixelnorm}; }

  bool has_weight() const {
    return kind == LayerKind::dense || kind == LayerKind::conv2d ||
           kind == LayerKind::convtranspose2d || kind == LayerKind::layernorm;
  }
  /// Weight layers whose matrix is eligible for spectral normalization.
  bool is_linear() const {
    return kind == LayerKind::dense || kind == LayerKind::conv2d ||
           kind == LayerKind::convtranspose2d;
  }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

std::string_view kind_name(LayerKind kind);

/// "dense(64)", "conv(48,4,2,1)", "convt(96,4,2,1)", "lrelu(0.2)", "relu", ...
std::string format_layer(const LayerSpec& spec);
LayerSpec parse_layer(std::string_view token);

/// Whitespace- or ';'-separated list of layer tokens.
std::vector<LayerSpec> parse_layers(std::string_view text);
std::string format_layers(const std::vector<LayerSpec>& layers);

/// Per-sample output shape; throws ShapeError with `where` in the message.
Shape infer_output_shape(const LayerSpec& spec, const Shape& in, std::string_view where = {});

/// Per-sample weight and bias shapes for a weight layer (empty for others).
Shape weight_shape(const LayerSpec& spec, const Shape& in);
Shape bias_shape(const LayerSpec& spec, const Shape& in);

// --- kernels ---------------------------------------------------------------
// Backward functions accumulate (+=) into dW/db when non-null and overwrite
// dx when non-null.

template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& x, const BasicTensor<T>& W,
                             const BasicTensor<T>& b);
template <typename T>
void dense_backward(const BasicTensor<T>& x, const BasicTensor<T>& W, const BasicTensor<T>& dy,
                    BasicTensor<T>* dW, BasicTensor<T>* db, BasicTensor<T>* dx);

template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& x, const BasicTensor<T>& W,
                              const BasicTensor<T>& b, std::size_t stride, std::size_t pad);
template <typename T>
void conv2d_backward(const BasicTensor<T>& x, const BasicTensor<T>& W, const BasicTensor<T>& dy,
                     std::size_t stride, std::size_t pad, BasicTensor<T>* dW, BasicTensor<T>* db,
                     BasicTensor<T>* dx);

/// Kernel layout (c_in, c_out, k, k); out = (in - 1) * stride - 2 * pad + k.
template <typename T>
BasicTensor<T> conv_transpose2d_forward(const BasicTensor<T>& x, const BasicTensor<T>& W,
                                        const BasicTensor<T>& b, std::size_t stride,
                                        std::size_t pad);
template <typename T>
void conv_transpose2d_backward(const BasicTensor<T>& x, const BasicTensor<T>& W,
                               const BasicTensor<T>& dy, std::size_t stride, std::size_t pad,
                               BasicTensor<T>* dW, BasicTensor<T>* db, BasicTensor<T>* dx);

template <typename T>
BasicTensor<T> lrelu_forward(const BasicTensor<T>& x, double slope);
template <typename T>
BasicTensor<T> lrelu_backward(const BasicTensor<T>& x, const BasicTensor<T>& dy, double slope);

template <typename T>
BasicTensor<T> relu_forward(const BasicTensor<T>& x);
template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& x, const BasicTensor<T>& dy);

template <typename T>
BasicTensor<T> tanh_forward(const BasicTensor<T>& x);
/// Uses the forward output y: dx = dy * (1 - y^2).
template <typename T>
BasicTensor<T> tanh_backward(const BasicTensor<T>& y, const BasicTensor<T>& dy);

/// Normalizes every sample over all of its features, then applies the
/// elementwise affine (gain, bias). `stats` receives (mean, 1/std) per sample.
template <typename T>
BasicTensor<T> layernorm_forward(const BasicTensor<T>& x, const BasicTensor<T>& gain,
                                 const BasicTensor<T>& bias, std::vector<T>* stats = nullptr);
template <typename T>
void layernorm_backward(const BasicTensor<T>& x, const BasicTensor<T>& gain,
                        const std::vector<T>& stats, const BasicTensor<T>& dy,
                        BasicTensor<T>* dgain, BasicTensor<T>* dbias, BasicTensor<T>* dx);

/// b = a / sqrt(mean_c(a^2) + eps) at every spatial position. Axis 1 is the
/// channel axis; rank-2 input (N, F) is treated as F channels of one pixel.
/// `scales` receives the per-position factor.
template <typename T>
BasicTensor<T> pixelnorm_forward(const BasicTensor<T>& x, std::vector<T>* scales = nullptr);
template <typename T>
BasicTensor<T> pixelnorm_backward(const BasicTensor<T>& x, const std::vector<T>& scales,
                                  const BasicTensor<T>& dy);

}  // namespace abcas::nn
