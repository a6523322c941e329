// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0
//
// Adaptive bound control of the discriminator's spectral norm.
//
// On every discriminator step the controller observes the batch critic gap
//   dist = max(C_real) - min(C_fake),
// folds it into a running average dm <- alpha * dm + (1 - alpha) * dist,
// and maps dm to the multiplier applied to every normalized layer:
//   c = clamp(dm / beta, 0, 0.98),  r = c / (1 - c),  m = 0.9^r.
// A large gap therefore shrinks the spectral norm; dm <= 0 leaves plain
// spectral normalization (m = 1). The clamp keeps r finite (r <= 49) and keeps
// the map monotone when dm reaches beta.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace abcas::control {

inline constexpr double kDefaultAlpha = 0.9999;
inline constexpr double kDefaultBeta = 4.0;
inline constexpr double kMultiplierBase = 0.9;
inline constexpr double kClampMax = 0.98;

enum class Mode { adaptive, fixed };

class ControllerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AbcasState {
  Mode mode = Mode::adaptive;
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;
  double fixed_m = 1.0;  // used in fixed mode only
  double r = 0.0;
  double dm = 0.0;
  double m = 1.0;
  double last_dist = 0.0;  // most recent observed gap, for logging
  std::uint64_t counter = 0;

  friend bool operator==(const AbcasState&, const AbcasState&) = default;
};

AbcasState make_adaptive(double beta = kDefaultBeta, double alpha = kDefaultAlpha);
AbcasState make_fixed(double m0);

/// counter <- counter + 1; returns the new counter.
std::uint64_t advance(AbcasState& state);

/// Odd counters update the discriminator (and the controller).
inline bool is_discriminator_step(const AbcasState& state) { return state.counter % 2 == 1; }

/// max(real) - min(fake). Throws ControllerError on empty or non-finite input.
double critic_gap(std::span<const double> c_real, std::span<const double> c_fake);

/// clamp(dm / beta, 0, 0.98) mapped through c / (1 - c).
double r_from_dm(double dm, double beta);

/// Applies one observation. On an even counter, or in fixed mode, r and dm
/// are left untouched (fixed mode still records last_dist).
AbcasState observe_and_update(AbcasState state, std::span<const double> c_real,
                              std::span<const double> c_fake);

/// 0.9^r in adaptive mode, m0 in fixed mode.
double multiplier(const AbcasState& state);

}  // namespace abcas::control
