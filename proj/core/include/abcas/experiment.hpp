// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run directories, sweeps and trajectory export.
//
// A run directory holds:
//   manifest.cfg       resolved config (parseable by load_config) plus version/seed comments
//   metrics.csv        one row per logged step, starting with the step-0 evaluation
//   checkpoint_G.abt   flat generator parameters, rewritten at every evaluation
//   checkpoint_D.abt   flat discriminator parameters, likewise
//   samples.abt        final generator output on the fixed evaluation latents
//   status.txt         "running", "done", "aborted <reason>" or "config_error <reason>"

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "abcas/config.hpp"
#include "abcas/controller.hpp"

namespace abcas::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumeric = 2 };

/// "v<major.minor.patch>-<git describe>" as baked in at build time.
std::string version_string();

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  std::uint64_t steps_done = 0;
  double final_mmd2 = 0.0;
};

/// Trains one run into `out_dir` (created if needed). Never throws for
/// config or numeric problems; those are reported through the exit code and
/// status.txt. `log` (may be null) receives progress lines.
RunResult run_training(const RunConfig& config, const std::filesystem::path& out_dir,
                       std::ostream* log = nullptr);

struct SweepSetting {
  std::string name;  // sub-directory, e.g. fixed_m0.7 or abcas_beta4
  control::Mode mode = control::Mode::adaptive;
  double m = 1.0;
  double beta = control::kDefaultBeta;
};

/// Fixed settings first (in config order), then adaptive ones.
std::vector<SweepSetting> sweep_settings(const RunConfig& config);
RunConfig apply_setting(const RunConfig& config, const SweepSetting& setting);

struct SweepRow {
  SweepSetting setting;
  double best_mmd2 = 0.0;
  std::uint64_t best_step = 0;
  double final_mmd2 = 0.0;
  std::string status;  // done | aborted | config_error | missing
};

inline constexpr const char* kSummaryHeader = "setting,mode,m,beta,best_mmd2,best_step,final_mmd2,status";

/// Best (first minimum) and final mmd2 read back from a run directory.
SweepRow summarize_run(const std::filesystem::path& run_dir, const SweepSetting& setting);

/// First word of status.txt, or "missing".
std::string read_status(const std::filesystem::path& run_dir);

/// Runs every setting into out_dir/<name> and writes out_dir/summary.csv.
/// With `resume`, settings whose status is "done" are not rerun. Individual
/// failures are recorded in the summary; the return value is kExitConfig
/// only when the base config itself is invalid.
int run_sweep(const RunConfig& config, const std::filesystem::path& out_dir, bool resume,
              unsigned jobs = 1, std::ostream* log = nullptr);

/// Writes run_dir/r_traj.csv with columns step,r,m copied verbatim from
/// metrics.csv. Throws std::runtime_error if metrics.csv is missing or
/// malformed.
std::filesystem::path extract_trajectory(const std::filesystem::path& run_dir);

}  // namespace abcas::cli
