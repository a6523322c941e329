// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abcas/losses.hpp"

namespace abcas::train {

namespace {

std::vector<double> to_double(const Tensor& t) {
  return std::vector<double>(t.data().begin(), t.data().end());
}

Tensor from_double(const Shape& dims, const std::vector<double>& v) {
  return Tensor(dims, std::vector<float>(v.begin(), v.end()));
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (batch_size < 2) fail("batch_size must be at least 2");
  if (!(lr_d > 0.0) || !(lr_g > 0.0)) fail("learning rates must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) fail("beta2 must lie in (0, 1)");
  if (!(alpha >= 0.0 && alpha < 1.0)) fail("alpha must lie in [0, 1)");
  if (!(beta > 0.0)) fail("beta must be positive");
  if (mode == control::Mode::fixed && !(m > 0.0 && m <= 1.0)) fail("m must lie in (0, 1]");
  if (eval_every == 0) fail("eval_every must be positive");
  if (latent_dim == 0) fail("latent_dim must be positive");
}

NumericAbort::NumericAbort(std::uint64_t step, metrics::MetricsRecord last_finite,
                           const std::string& why)
    : std::runtime_error("numeric abort at step " + std::to_string(step) + ": " + why),
      step_(step),
      last_(last_finite) {}

Trainer::Trainer(TrainConfig config, nn::NetworkSpec generator, nn::NetworkSpec discriminator,
                 Tensor dataset)
    : config_((config.validate(), config)),
      gen_(std::move(generator), derive_seed(config.seed, 1)),
      disc_(std::move(discriminator), derive_seed(config.seed, 2)),
      data_(std::move(dataset)),
      rng_latent_(derive_seed(config.seed, 3)),
      rng_data_(derive_seed(config.seed, 4)),
      start_(std::chrono::steady_clock::now()) {
  if (data_.rank() < 2) throw ShapeError("dataset must be (n, sample...)");
  if (data_.dim(0) < config_.batch_size) {
    throw std::invalid_argument("dataset has " + std::to_string(data_.dim(0)) +
                                " samples, fewer than batch_size " +
                                std::to_string(config_.batch_size));
  }
  sample_shape_.assign(data_.dims().begin() + 1, data_.dims().end());
  if (gen_.input_shape() != Shape{config_.latent_dim}) {
    throw ShapeError("generator input " + shape_string(gen_.input_shape()) +
                     " does not match latent_dim " + std::to_string(config_.latent_dim));
  }
  if (shape_size(gen_.output_shape()) != shape_size(sample_shape_)) {
    throw ShapeError("generator output " + shape_string(gen_.output_shape()) +
                     " does not match sample shape " + shape_string(sample_shape_));
  }
  if (disc_.input_shape() != sample_shape_) {
    throw ShapeError("discriminator input " + shape_string(disc_.input_shape()) +
                     " does not match sample shape " + shape_string(sample_shape_));
  }
  if (shape_size(disc_.output_shape()) != 1) {
    throw ShapeError("discriminator must output one value per sample, got " +
                     shape_string(disc_.output_shape()));
  }

  ctrl_ = config_.mode == control::Mode::fixed
              ? control::make_fixed(config_.m)
              : control::make_adaptive(config_.beta, config_.alpha);
  steps_per_epoch_ = std::max<std::uint64_t>(1, data_.dim(0) / config_.batch_size);
  last_.m = control::multiplier(ctrl_);
}

Tensor Trainer::sample_latent(std::size_t n, Rng& rng) const {
  return normal_tensor<float>({n, config_.latent_dim}, rng);
}

Tensor Trainer::to_sample_shape(Tensor t) const {
  Shape dims{t.dim(0)};
  dims.insert(dims.end(), sample_shape_.begin(), sample_shape_.end());
  return std::move(t).reshaped(std::move(dims));
}

Tensor Trainer::generate(const Tensor& z) const { return to_sample_shape(gen_.predict(z)); }

Tensor Trainer::next_real_batch() {
  const std::size_t n = data_.dim(0);
  const std::size_t b = config_.batch_size;
  if (order_.empty() || cursor_ + b > n) {
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::shuffle(order_.begin(), order_.end(), rng_data_);
    cursor_ = 0;
  }
  const std::size_t stride = data_.stride0();
  Shape dims = data_.dims();
  dims[0] = b;
  Tensor batch(dims);
  for (std::size_t i = 0; i < b; ++i) {
    const auto src = data_.data().subspan(order_[cursor_ + i] * stride, stride);
    std::copy(src.begin(), src.end(), batch.data().begin() + i * stride);
  }
  cursor_ += b;
  return batch;
}

void Trainer::abort(const std::string& why) const {
  throw NumericAbort(ctrl_.counter, last_, why);
}

metrics::MetricsRecord Trainer::discriminator_step(const Tensor& real_batch) {
  disc_.refresh_spectral(control::multiplier(ctrl_));

  const Tensor fake = generate(sample_latent(config_.batch_size, rng_latent_));
  auto [c_real, tape_real] = disc_.forward(real_batch);
  auto [c_fake, tape_fake] = disc_.forward(fake);
  const auto cr = to_double(c_real);
  const auto cf = to_double(c_fake);

  control::AbcasState next;
  try {
    next = control::observe_and_update(ctrl_, cr, cf);
  } catch (const control::ControllerError& e) {
    abort(e.what());
  }
  const auto lg = d_loss_grad(cr, cf);
  if (!std::isfinite(lg.loss)) abort("discriminator loss is not finite");
  ctrl_ = next;

  disc_.params().zero_grad();
  disc_.backward(tape_real, from_double(c_real.dims(), lg.d_real));
  disc_.backward(tape_fake, from_double(c_fake.dims(), lg.d_fake));
  const auto slots = disc_.params().slots();
  optimizer_step<float>(slots, opt_d_,
                        AdamConfig{config_.lr_d, config_.beta1, config_.beta2, 1e-8, config_.rectify});
  ++d_updates_;

  auto rec = last_;
  rec.d_loss = lg.loss;
  return rec;
}

metrics::MetricsRecord Trainer::generator_step() {
  disc_.refresh_spectral(control::multiplier(ctrl_));

  const Tensor z = sample_latent(config_.batch_size, rng_latent_);
  auto [out, tape_gen] = gen_.forward(z);
  const Shape out_dims = out.dims();
  auto [critic, tape_disc] = disc_.forward(to_sample_shape(std::move(out)));
  if (!critic.all_finite()) abort("non-finite critic output on generator step");
  const auto lg = g_loss_grad(to_double(critic));
  if (!std::isfinite(lg.loss)) abort("generator loss is not finite");

  Tensor dx = disc_.backward(tape_disc, from_double(critic.dims(), lg.d_fake), false);
  gen_.params().zero_grad();
  gen_.backward(tape_gen, std::move(dx).reshaped(out_dims));
  const auto slots = gen_.params().slots();
  optimizer_step<float>(slots, opt_g_,
                        AdamConfig{config_.lr_g, config_.beta1, config_.beta2, 1e-8, config_.rectify});
  ++g_updates_;

  auto rec = last_;
  rec.g_loss = lg.loss;
  return rec;
}

metrics::MetricsRecord Trainer::step(const Tensor& real_batch) {
  control::advance(ctrl_);
  auto rec = control::is_discriminator_step(ctrl_) ? discriminator_step(real_batch)
                                                   : generator_step();
  rec.step = ctrl_.counter;
  rec.epoch = ctrl_.counter / steps_per_epoch_;
  rec.dist = ctrl_.last_dist;
  rec.dm = ctrl_.dm;
  rec.r = ctrl_.r;
  rec.m = ctrl_.m;
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
                    .count();
  last_ = rec;
  return rec;
}

metrics::MetricsRecord Trainer::step() {
  // Real data is only consumed on discriminator steps.
  if (ctrl_.counter % 2 == 0) return step(next_real_batch());
  return step(Tensor());
}

double Trainer::evaluate(const Tensor& real, const Tensor& z, double bandwidth) {
  const Tensor fake = generate(z);
  if (!fake.all_finite()) abort("generator produced non-finite samples");
  last_.mmd2 = metrics::mmd2_unbiased(real, fake, bandwidth);
  return last_.mmd2;
}

}  // namespace abcas::train
