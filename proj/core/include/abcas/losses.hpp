// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0
//
// Non-saturating GAN losses on raw (pre-sigmoid) critic outputs.

#pragma once

#include <span>
#include <vector>

namespace abcas::train {

/// log(1 + e^t) without overflow.
double softplus(double t);
double sigmoid(double t);

/// mean softplus(-c_real) + mean softplus(c_fake).
double d_loss(std::span<const double> c_real, std::span<const double> c_fake);

/// mean softplus(-c_fake).
double g_loss(std::span<const double> c_fake);

struct DLossGrad {
  double loss = 0.0;
  std::vector<double> d_real;
  std::vector<double> d_fake;
};

struct GLossGrad {
  double loss = 0.0;
  std::vector<double> d_fake;
};

DLossGrad d_loss_grad(std::span<const double> c_real, std::span<const double> c_fake);
GLossGrad g_loss_grad(std::span<const double> c_fake);

}  // namespace abcas::train
