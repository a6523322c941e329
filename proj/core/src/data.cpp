// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/data.hpp"

#include <cmath>
#include <numbers>

#include "abcas/random.hpp"

namespace abcas::data {

void validate(const Ring2dSpec& spec) {
  if (spec.k_modes < 1) throw std::invalid_argument("ring2d needs k_modes >= 1");
  if (!(spec.sigma > 0.0)) throw std::invalid_argument("ring2d needs sigma > 0");
  if (!(spec.radius >= 0.0)) throw std::invalid_argument("ring2d needs radius >= 0");
  if (spec.n < 1) throw std::invalid_argument("ring2d needs n >= 1");
}

void validate(const BlobsSpec& spec) {
  if (spec.img_size != 8 && spec.img_size != 16 && spec.img_size != 32) {
    throw std::invalid_argument("blobs img_size must be 8, 16 or 32");
  }
  if (spec.n_images < 1) throw std::invalid_argument("blobs needs n_images >= 1");
}

Tensor generate_ring2d(const Ring2dSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick(0, spec.k_modes - 1);
  std::normal_distribution<double> noise(0.0, spec.sigma);
  Tensor out({spec.n, 2});
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(pick(rng)) /
                         static_cast<double>(spec.k_modes);
    const double x = spec.radius * std::cos(angle) + noise(rng);
    const double y = spec.radius * std::sin(angle) + noise(rng);
    out.at(i, 0) = static_cast<float>(x);
    out.at(i, 1) = static_cast<float>(y);
  }
  return out;
}

std::vector<std::pair<double, double>> blob_centers(const BlobsSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> pos(0.0, static_cast<double>(spec.img_size));
  std::vector<std::pair<double, double>> centers(spec.n_images);
  for (auto& c : centers) {
    c.first = pos(rng);
    c.second = pos(rng);
  }
  return centers;
}

Tensor generate_blobs(const BlobsSpec& spec) {
  const auto centers = blob_centers(spec);
  const std::size_t s = spec.img_size;
  const double width = static_cast<double>(s) / 8.0;
  const double inv2w2 = 1.0 / (2.0 * width * width);
  Tensor out({spec.n_images, 1, s, s});
  for (std::size_t i = 0; i < spec.n_images; ++i) {
    const auto [cx, cy] = centers[i];
    float* img = out.data().data() + i * s * s;
    for (std::size_t y = 0; y < s; ++y) {
      for (std::size_t x = 0; x < s; ++x) {
        // Pixel centres sit at half-integer coordinates.
        const double dx = static_cast<double>(x) + 0.5 - cx;
        const double dy = static_cast<double>(y) + 0.5 - cy;
        img[y * s + x] = static_cast<float>(2.0 * std::exp(-(dx * dx + dy * dy) * inv2w2) - 1.0);
      }
    }
  }
  return out;
}

}  // namespace abcas::data
