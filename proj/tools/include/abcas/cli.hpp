// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace abcas::cli {

/// Entry point of the `abcas` executable: train, sweep and traj subcommands.
/// Returns the process exit code (0 ok, 1 config error, 2 numeric abort).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace abcas::cli
