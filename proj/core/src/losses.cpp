// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace abcas::train {

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

namespace {

void require_nonempty(std::span<const double> c, const char* what) {
  if (c.empty()) throw std::invalid_argument(std::string(what) + ": empty critic batch");
}

}  // namespace

double d_loss(std::span<const double> c_real, std::span<const double> c_fake) {
  return d_loss_grad(c_real, c_fake).loss;
}

double g_loss(std::span<const double> c_fake) { return g_loss_grad(c_fake).loss; }

DLossGrad d_loss_grad(std::span<const double> c_real, std::span<const double> c_fake) {
  require_nonempty(c_real, "d_loss");
  require_nonempty(c_fake, "d_loss");
  DLossGrad out;
  const double nr = static_cast<double>(c_real.size());
  const double nf = static_cast<double>(c_fake.size());
  double lr = 0.0, lf = 0.0;
  out.d_real.resize(c_real.size());
  out.d_fake.resize(c_fake.size());
  for (std::size_t i = 0; i < c_real.size(); ++i) {
    lr += softplus(-c_real[i]);
    out.d_real[i] = -sigmoid(-c_real[i]) / nr;
  }
  for (std::size_t i = 0; i < c_fake.size(); ++i) {
    lf += softplus(c_fake[i]);
    out.d_fake[i] = sigmoid(c_fake[i]) / nf;
  }
  out.loss = lr / nr + lf / nf;
  return out;
}

GLossGrad g_loss_grad(std::span<const double> c_fake) {
  require_nonempty(c_fake, "g_loss");
  GLossGrad out;
  const double n = static_cast<double>(c_fake.size());
  out.d_fake.resize(c_fake.size());
  double l = 0.0;
  for (std::size_t i = 0; i < c_fake.size(); ++i) {
    l += softplus(-c_fake[i]);
    out.d_fake[i] = -sigmoid(-c_fake[i]) / n;
  }
  out.loss = l / n;
  return out;
}

}  // namespace abcas::train
