// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>

#include "abcas/data.hpp"
#include "abcas/network.hpp"
#include "abcas/trainer.hpp"

using namespace abcas;
using namespace abcas::train;

namespace {

Trainer make_trainer(TrainConfig cfg) {
  cfg.latent_dim = 4;
  const Tensor data = data::generate_ring2d({8, 0.8, 0.05, 256, 9});
  nn::NetworkSpec g{{4}, nn::parse_layers("pixelnorm dense(16) lrelu(0.2) dense(16) layernorm relu dense(2)"), false};
  nn::NetworkSpec d{{2}, nn::parse_layers("dense(16) relu dense(16) relu dense(1)"), true};
  return Trainer(cfg, std::move(g), std::move(d), data);
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("config validation") {
    TrainConfig c;
    CHECK_NOTHROW(c.validate());
    c.batch_size = 1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.lr_d = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.mode = control::Mode::fixed;
    c.m = 1.2;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }

  TEST_CASE("parity discipline and frozen networks") {
    Trainer t = make_trainer({});
    for (std::uint64_t s = 1; s <= 41; ++s) {
      const auto g_before = nn::flatten_parameters(t.generator());
      const auto d_before = nn::flatten_parameters(t.discriminator());
      const auto ctrl_before = t.controller();
      const auto rec = t.step();
      CHECK(rec.step == s);
      const bool d_step = s % 2 == 1;
      if (d_step) {
        CHECK(nn::flatten_parameters(t.generator()) == g_before);
        CHECK(nn::flatten_parameters(t.discriminator()) != d_before);
      } else {
        CHECK(nn::flatten_parameters(t.discriminator()) == d_before);
        CHECK(nn::flatten_parameters(t.generator()) != g_before);
        auto c = t.controller();
        c.counter = ctrl_before.counter;
        CHECK(c == ctrl_before);
      }
    }
    CHECK(t.d_updates() == 21);
    CHECK(t.g_updates() == 20);
    CHECK(t.controller().counter == 41);
  }

  TEST_CASE("records carry the controller snapshot") {
    Trainer t = make_trainer({});
    for (int i = 0; i < 50; ++i) {
      const auto rec = t.step();
      CHECK(rec.all_finite());
      CHECK(rec.r == t.controller().r);
      CHECK(rec.dm == t.controller().dm);
      CHECK(rec.m == std::pow(0.9, rec.r));
    }
  }

  TEST_CASE("fixed mode logs a constant multiplier") {
    TrainConfig cfg;
    cfg.mode = control::Mode::fixed;
    cfg.m = 0.6;
    Trainer t = make_trainer(cfg);
    for (int i = 0; i < 30; ++i) {
      const auto rec = t.step();
      CHECK(rec.m == 0.6);
      CHECK(rec.r == 0.0);
    }
  }

  TEST_CASE("seeded runs are bitwise reproducible") {
    TrainConfig cfg;
    cfg.seed = 123;
    Trainer a = make_trainer(cfg), b = make_trainer(cfg);
    for (int i = 0; i < 200; ++i) {
      auto ra = a.step(), rb = b.step();
      ra.wall_ms = rb.wall_ms = 0;
      REQUIRE(ra == rb);
    }
    CHECK(nn::flatten_parameters(a.generator()) == nn::flatten_parameters(b.generator()));
  }

  TEST_CASE("non-finite critic aborts with the step index") {
    Trainer t = make_trainer({});
    t.step();
    t.step();
    t.discriminator().params().layers[0].bias[0] = std::numeric_limits<float>::quiet_NaN();
    try {
      t.step();
      FAIL("expected NumericAbort");
    } catch (const NumericAbort& e) {
      CHECK(e.step() == 3);
      CHECK(e.last_finite().step == 2);
    }
  }

  TEST_CASE("mismatched networks are rejected") {
    const Tensor data = data::generate_ring2d({8, 0.8, 0.05, 64, 1});
    TrainConfig cfg;
    cfg.latent_dim = 4;
    nn::NetworkSpec g{{4}, nn::parse_layers("dense(3)"), false};
    nn::NetworkSpec d{{2}, nn::parse_layers("dense(1)"), true};
    CHECK_THROWS_AS(Trainer(cfg, g, d, data), ShapeError);
    nn::NetworkSpec g2{{4}, nn::parse_layers("dense(2)"), false};
    nn::NetworkSpec d2{{2}, nn::parse_layers("dense(2)"), true};
    CHECK_THROWS_AS(Trainer(cfg, g2, d2, data), ShapeError);
    nn::NetworkSpec g3{{5}, nn::parse_layers("dense(2)"), false};
    CHECK_THROWS_AS(Trainer(cfg, g3, d, data), ShapeError);
  }

  TEST_CASE("batches cover the dataset once per epoch") {
    Trainer t = make_trainer({});
    CHECK(t.steps_per_epoch() == 16);
    std::vector<float> seen;
    for (int i = 0; i < 16; ++i) {
      const auto b = t.next_real_batch();
      CHECK(b.dims() == Shape{16, 2});
      seen.insert(seen.end(), b.data().begin(), b.data().end());
    }
    auto all = t.dataset().storage();
    std::sort(all.begin(), all.end());
    std::sort(seen.begin(), seen.end());
    CHECK(seen == all);
  }

  TEST_CASE("evaluation stores mmd2 in later records") {
    Trainer t = make_trainer({});
    Rng rng(1);
    const Tensor z = t.sample_latent(64, rng);
    const double v = t.evaluate(t.dataset(), z, 0.5);
    CHECK(std::isfinite(v));
    CHECK(t.step().mmd2 == v);
  }
}
