// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "abcas/losses.hpp"
#include "abcas/optimizer.hpp"
#include "oracles.hpp"

using namespace abcas;
using namespace abcas::train;

TEST_SUITE("losses") {
  TEST_CASE("values at zero") {
    const std::vector<double> z{0.0, 0.0, 0.0};
    CHECK(d_loss(z, z) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
    CHECK(g_loss(z) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  }

  TEST_CASE("limits stay finite") {
    const std::vector<double> big{800.0}, small{-800.0};
    CHECK(d_loss(big, small) == 0.0);
    CHECK(g_loss(big) == 0.0);
    CHECK(g_loss(small) == doctest::Approx(800.0));
    CHECK(std::isfinite(d_loss(small, big)));
    CHECK(softplus(-1000.0) >= 0.0);
    CHECK(softplus(1000.0) == 1000.0);
  }

  TEST_CASE("gradients match finite differences") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      CHECK(testing::gradcheck_d_loss(8, seed) < 1e-6);
      CHECK(testing::gradcheck_g_loss(8, seed) < 1e-6);
    }
  }

  TEST_CASE("empty batches are rejected") {
    const std::vector<double> e, one{1.0};
    CHECK_THROWS(d_loss(e, one));
    CHECK_THROWS(g_loss(e));
  }
}

TEST_SUITE("optimizer") {
  TEST_CASE("zero gradient leaves parameters unchanged") {
    Tensor64 p({3}, {1.0, -2.0, 0.5});
    const Tensor64 g({3});
    const Tensor64 before = p;
    OptimizerState st;
    const std::vector<ParamSlot<double>> slots{{&p, &g}};
    for (int i = 0; i < 10; ++i) optimizer_step<double>(slots, st, {});
    CHECK(p == before);
    CHECK(st.step == 10);
  }

  TEST_CASE("beta1 = 0 keeps the raw gradient as first moment") {
    Tensor64 p({2}, {0.0, 0.0});
    const Tensor64 g({2}, {0.3, -4.0});
    OptimizerState st;
    const std::vector<ParamSlot<double>> slots{{&p, &g}};
    optimizer_step<double>(slots, st, {.lr = 0.1});
    CHECK(st.first[0] == std::vector<double>{0.3, -4.0});
    // First bias-corrected step moves each coordinate by about lr.
    CHECK(p[0] == doctest::Approx(-0.1).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(0.1).epsilon(1e-6));
  }

  TEST_CASE("single-parameter quadratic converges") {
    for (bool rectify : {false, true}) {
      CAPTURE(rectify);
      Tensor64 p({1}, {0.0});
      Tensor64 g({1});
      OptimizerState st;
      const std::vector<ParamSlot<double>> slots{{&p, &g}};
      // The rectified variant takes plain momentum steps until the variance
      // estimate is trusted, so it needs a longer horizon.
      const int steps = rectify ? 2000 : 500;
      for (int i = 0; i < steps; ++i) {
        g[0] = 2.0 * (p[0] - 1.0);  // d/dp (p - 1)^2
        optimizer_step<double>(slots, st, {.lr = 0.01, .rectify = rectify});
      }
      CHECK(std::fabs(p[0] - 1.0) < 1e-3);
    }
  }

  TEST_CASE("rectification term") {
    CHECK(radam_rectification(0.999, 1) == 0.0);
    CHECK(radam_rectification(0.999, 4) == 0.0);
    const double late = radam_rectification(0.999, 100000);
    CHECK(late == doctest::Approx(1.0).epsilon(1e-3));
    double prev = 0.0;
    for (std::uint64_t t = 6; t < 3000; t += 7) {
      const double r = radam_rectification(0.999, t);
      CHECK(r > 0.0);
      CHECK(r >= prev);
      prev = r;
    }
  }

  TEST_CASE("moment shapes mirror parameters") {
    Tensor64 a({2, 3}), b({4});
    const Tensor64 ga({2, 3}, 1.0), gb({4}, 1.0);
    OptimizerState st;
    const std::vector<ParamSlot<double>> slots{{&a, &ga}, {&b, &gb}};
    optimizer_step<double>(slots, st, {});
    REQUIRE(st.first.size() == 2);
    CHECK(st.first[0].size() == 6);
    CHECK(st.second[1].size() == 4);
  }
}
