// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "abcas/tensor.hpp"

namespace abcas {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(seed ^ mix_seed(stream + 0x5851f42d4c957f2dULL));
}

template <typename T>
BasicTensor<T> normal_tensor(Shape dims, Rng& rng, double mean = 0.0, double stddev = 1.0) {
  BasicTensor<T> t(std::move(dims));
  std::normal_distribution<double> dist(mean, stddev);
  for (auto& x : t.data()) x = static_cast<T>(dist(rng));
  return t;
}

}  // namespace abcas
