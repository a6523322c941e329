// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace abcas::control {

AbcasState make_adaptive(double beta, double alpha) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("beta must be positive, got " + std::to_string(beta));
  }
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1), got " + std::to_string(alpha));
  }
  AbcasState s;
  s.mode = Mode::adaptive;
  s.beta = beta;
  s.alpha = alpha;
  s.m = 1.0;
  return s;
}

AbcasState make_fixed(double m0) {
  if (!(m0 > 0.0 && m0 <= 1.0)) {
    throw std::invalid_argument("fixed multiplier must lie in (0, 1], got " + std::to_string(m0));
  }
  AbcasState s;
  s.mode = Mode::fixed;
  s.fixed_m = m0;
  s.m = m0;
  return s;
}

std::uint64_t advance(AbcasState& state) { return ++state.counter; }

double critic_gap(std::span<const double> c_real, std::span<const double> c_fake) {
  if (c_real.empty() || c_fake.empty()) throw ControllerError("critic gap needs non-empty batches");
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(c_real.begin(), c_real.end(), finite) ||
      !std::all_of(c_fake.begin(), c_fake.end(), finite)) {
    throw ControllerError("non-finite critic output");
  }
  return *std::max_element(c_real.begin(), c_real.end()) -
         *std::min_element(c_fake.begin(), c_fake.end());
}

double r_from_dm(double dm, double beta) {
  const double c = std::clamp(dm / beta, 0.0, kClampMax);
  return c / (1.0 - c);
}

AbcasState observe_and_update(AbcasState state, std::span<const double> c_real,
                              std::span<const double> c_fake) {
  if (!is_discriminator_step(state)) return state;
  const double dist = critic_gap(c_real, c_fake);
  state.last_dist = dist;
  if (state.mode == Mode::fixed) return state;

  state.dm = state.alpha * state.dm + (1.0 - state.alpha) * dist;
  if (!std::isfinite(state.dm)) throw ControllerError("running distance became non-finite");
  state.r = r_from_dm(state.dm, state.beta);
  state.m = std::pow(kMultiplierBase, state.r);
  return state;
}

double multiplier(const AbcasState& state) {
  return state.mode == Mode::fixed ? state.fixed_m : std::pow(kMultiplierBase, state.r);
}

}  // namespace abcas::control
