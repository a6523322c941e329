// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0
//
// Alternating GAN training: odd steps update the discriminator and the
// spectral-norm controller, even steps update the generator.

#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "abcas/controller.hpp"
#include "abcas/metrics.hpp"
#include "abcas/network.hpp"
#include "abcas/optimizer.hpp"
#include "abcas/random.hpp"
#include "abcas/tensor.hpp"

namespace abcas::train {

struct TrainConfig {
  std::size_t batch_size = 16;
  double lr_d = 5e-4;
  double lr_g = 1e-4;
  double beta1 = 0.0;
  double beta2 = 0.999;
  bool rectify = false;
  double alpha = control::kDefaultAlpha;
  double beta = control::kDefaultBeta;
  control::Mode mode = control::Mode::adaptive;
  double m = 1.0;  // fixed-mode multiplier
  std::uint64_t steps = 20000;
  std::uint64_t seed = 0;
  std::uint64_t eval_every = 500;
  std::size_t latent_dim = 16;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// Raised when a loss or critic output stops being finite.
class NumericAbort : public std::runtime_error {
 public:
  NumericAbort(std::uint64_t step, metrics::MetricsRecord last_finite, const std::string& why);
  std::uint64_t step() const noexcept { return step_; }
  const metrics::MetricsRecord& last_finite() const noexcept { return last_; }

 private:
  std::uint64_t step_;
  metrics::MetricsRecord last_;
};

class Trainer {
 public:
  /// `dataset` is (n, sample...) real data. The generator's output is
  /// reshaped to the sample shape, so their element counts must agree, and the
  /// discriminator must emit one value per sample.
  Trainer(TrainConfig config, nn::NetworkSpec generator, nn::NetworkSpec discriminator,
          Tensor dataset);

  /// Advances the counter and performs one update. On discriminator steps
  /// `real_batch` is the real mini-batch; it is ignored on generator steps.
  metrics::MetricsRecord step(const Tensor& real_batch);

  /// step() with the next shuffled batch drawn from the dataset.
  metrics::MetricsRecord step();

  /// Next mini-batch of the epoch-wise shuffled dataset.
  Tensor next_real_batch();

  /// Generator output for latent codes z, shaped like dataset samples.
  Tensor generate(const Tensor& z) const;
  Tensor sample_latent(std::size_t n, Rng& rng) const;

  /// Scores generated samples against `real` and stores the result as the
  /// mmd2 column of subsequent records.
  double evaluate(const Tensor& real, const Tensor& z, double bandwidth);

  const TrainConfig& config() const noexcept { return config_; }
  const control::AbcasState& controller() const noexcept { return ctrl_; }
  nn::Network<float>& generator() noexcept { return gen_; }
  nn::Network<float>& discriminator() noexcept { return disc_; }
  const Tensor& dataset() const noexcept { return data_; }
  const metrics::MetricsRecord& last_record() const noexcept { return last_; }
  std::uint64_t steps_per_epoch() const noexcept { return steps_per_epoch_; }
  std::uint64_t d_updates() const noexcept { return d_updates_; }
  std::uint64_t g_updates() const noexcept { return g_updates_; }

 private:
  metrics::MetricsRecord discriminator_step(const Tensor& real_batch);
  metrics::MetricsRecord generator_step();
  Tensor to_sample_shape(Tensor t) const;
  [[noreturn]] void abort(const std::string& why) const;

  TrainConfig config_;
  nn::Network<float> gen_;
  nn::Network<float> disc_;
  Tensor data_;
  Shape sample_shape_;
  control::AbcasState ctrl_;
  OptimizerState opt_g_;
  OptimizerState opt_d_;
  Rng rng_latent_;
  Rng rng_data_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::uint64_t steps_per_epoch_ = 1;
  std::uint64_t d_updates_ = 0;
  std::uint64_t g_updates_ = 0;
  metrics::MetricsRecord last_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace abcas::train
