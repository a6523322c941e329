// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "abcas/linalg.hpp"
#include "abcas/specnorm.hpp"
#include "oracles.hpp"

using namespace abcas;

namespace {

sn::SpectralLayerState converged(const Tensor64& W, double m, std::uint64_t seed = 1) {
  auto s = sn::make_state(W.dim(0), seed, m);
  for (int i = 0; i < 200; ++i) sn::refresh(s, W);
  return s;
}

}  // namespace

TEST_SUITE("specnorm") {
  TEST_CASE("diag(2, 1) with m = 0.9") {
    const Tensor64 W({2, 2}, {2, 0, 0, 1});
    auto s = converged(W, 0.9);
    const auto Wp = sn::normalized_weight(s, W);
    CHECK(Wp[0] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(Wp[3] == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(std::fabs(Wp[1]) < 1e-15);
    CHECK(linalg::spectral_norm_exact(Wp) == doctest::Approx(0.9).epsilon(1e-12));
  }

  TEST_CASE("unit-norm weight with m = 1 is unchanged") {
    const Tensor64 W({2, 2}, {1.0, 0.0, 0.0, 0.3});
    auto s = converged(W, 1.0);
    const auto Wp = sn::normalized_weight(s, W);
    CHECK(testing::rel_error(Wp.data(), W.data()) < 1e-12);
  }

  TEST_CASE("normalized norm equals m for converged layers") {
    Rng rng(17);
    for (double m : {0.5, 0.9, 1.0}) {
      const Tensor64 W = testing::gapped_matrix(7, 5, 0.05, rng);
      auto s = converged(W, m);
      const double sigma = testing::hestenes_spectral_norm(sn::normalized_weight(s, W));
      CHECK(sigma == doctest::Approx(m).epsilon(1e-6));
    }
  }

  TEST_CASE("scale invariance") {
    Rng rng(2);
    const Tensor64 W = testing::gapped_matrix(4, 6, 0.05, rng);
    Tensor64 cW = W;
    for (auto& x : cW.data()) x *= 37.5;
    auto s1 = converged(W, 0.8);
    auto s2 = converged(cW, 0.8);
    const auto a = sn::normalized_weight(s1, W);
    const auto b = sn::normalized_weight(s2, cW);
    CHECK(testing::rel_error(a.data(), b.data()) < 1e-6);
  }

  TEST_CASE("multiplier must lie in (0, 1]") {
    auto s = sn::make_state(3, 0);
    CHECK_THROWS_AS(sn::set_multiplier(s, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sn::set_multiplier(s, 1.01), std::invalid_argument);
    CHECK_NOTHROW(sn::set_multiplier(s, 1.0));
    CHECK_THROWS_AS(sn::make_state(3, 0, -0.5), std::invalid_argument);
  }

  TEST_CASE("use before refresh is an error") {
    auto s = sn::make_state(2, 0);
    const Tensor64 W({2, 2}, 1.0);
    CHECK_THROWS_AS(sn::normalized_weight(s, W), sn::SpectralNormError);
    CHECK_THROWS_AS(sn::backward_through_norm(s, W, W), sn::SpectralNormError);
  }

  TEST_CASE("zero weight is passed through and flagged") {
    const Tensor64 Z({3, 2});
    auto s = sn::make_state(3, 0, 0.9);
    sn::refresh(s, Z);
    CHECK(s.degenerate);
    const auto Wp = sn::normalized_weight(s, Z);
    CHECK(Wp == Z);
    CHECK(Wp.all_finite());
    const Tensor64 G({3, 2}, 1.0);
    CHECK(sn::backward_through_norm(s, Z, G) == G);
  }

  TEST_CASE("backward matches finite differences") {
    CHECK(testing::gradcheck_spectral_backward(3, 3, 0.8, 1) < 1e-4);
    CHECK(testing::gradcheck_spectral_backward(5, 2, 1.0, 2) < 1e-4);
    CHECK(testing::gradcheck_spectral_backward(2, 7, 0.5, 3) < 1e-4);
  }

  TEST_CASE("backward scales by 1/c when W is scaled by c") {
    Rng rng(6);
    const Tensor64 W = normal_tensor<double>({3, 4}, rng);
    const Tensor64 G = normal_tensor<double>({3, 4}, rng);
    Tensor64 cW = W;
    for (auto& x : cW.data()) x *= 4.0;
    auto s = converged(W, 0.8);
    auto sc = s;
    sn::rescale_frozen(sc, cW);
    const auto g1 = sn::backward_through_norm(s, W, G);
    auto g2 = sn::backward_through_norm(sc, cW, G);
    for (auto& x : g2.data()) x *= 4.0;
    CHECK(testing::rel_error(g1.data(), g2.data()) < 1e-12);
  }
}
