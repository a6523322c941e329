// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic datasets. Everything is a pure function of (spec, seed).

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "abcas/tensor.hpp"

namespace abcas::data {

/// Mixture of k isotropic Gaussians centred on a circle.
struct Ring2dSpec {
  std::size_t k_modes = 8;
  double radius = 0.8;
  double sigma = 0.05;
  std::size_t n = 4096;
  std::uint64_t seed = 0;
};

/// Grayscale s x s images in [-1, 1], one Gaussian bump per image.
struct BlobsSpec {
  std::size_t img_size = 16;  // 8, 16 or 32
  std::size_t n_images = 2048;
  std::uint64_t seed = 0;
};

void validate(const Ring2dSpec& spec);
void validate(const BlobsSpec& spec);

/// (n, 2) samples; mode j is centred at radius * (cos 2pi j/k, sin 2pi j/k).
Tensor generate_ring2d(const Ring2dSpec& spec);

/// (n, 1, s, s) images. Bump width is s / 8 pixels.
Tensor generate_blobs(const BlobsSpec& spec);

/// Bump centres (x, y) in pixel units, in generation order; exposed so the
/// placement distribution can be checked independently of rendering.
std::vector<std::pair<double, double>> blob_centers(const BlobsSpec& spec);

}  // namespace abcas::data
