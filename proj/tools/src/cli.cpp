// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/cli.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>
#include <string>

#include "abcas/config.hpp"
#include "abcas/experiment.hpp"

namespace abcas::cli {

namespace {

struct TrainArgs {
  std::string config;
  std::string out = "run";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<double> m;
  std::optional<double> beta;
};

struct SweepArgs {
  std::string config;
  std::string out = "sweep";
  bool resume = false;
  unsigned jobs = 1;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = load_config(a.config);
    if (a.seed) config.train.seed = *a.seed;
    if (a.mode) set_key(config, "mode", *a.mode);
    if (a.m) config.train.m = *a.m;
    if (a.beta) config.train.beta = *a.beta;
    validate(config);
  } catch (const ConfigError& e) {
    err << "abcas train: " << e.what() << '\n';
    return kExitConfig;
  }
  const RunResult r = run_training(config, a.out, &out);
  if (r.exit_code != kExitOk) err << "abcas train: " << r.message << '\n';
  return r.exit_code;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = load_config(a.config);
  } catch (const ConfigError& e) {
    err << "abcas sweep: " << e.what() << '\n';
    return kExitConfig;
  }
  const int code = run_sweep(config, a.out, a.resume, a.jobs, &out);
  if (code == kExitOk) out << "summary: " << (std::filesystem::path(a.out) / "summary.csv").string() << '\n';
  return code;
}

int cmd_traj(const std::string& run_dir, std::ostream& out, std::ostream& err) {
  try {
    out << extract_trajectory(run_dir).string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "abcas traj: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"abcas: GAN training with adaptive spectral-norm bound control", "abcas"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train one run into --out");
  t->add_option("--config", train.config, "Config file (key = value lines)")->required();
  t->add_option("--seed", train.seed, "Override the seed");
  t->add_option("--out", train.out, "Run directory")->capture_default_str();
  t->add_option("--mode", train.mode, "adaptive or fixed")
      ->check(CLI::IsMember({"adaptive", "fixed"}));
  t->add_option("--m", train.m, "Fixed-mode multiplier in (0, 1]");
  t->add_option("--beta", train.beta, "Adaptive-mode target gap");

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "Run every fixed-m and adaptive setting, then summarize");
  s->add_option("--config", sweep.config, "Config file (key = value lines)")->required();
  s->add_option("--out", sweep.out, "Sweep directory")->capture_default_str();
  s->add_flag("--resume", sweep.resume, "Skip settings whose run already finished");
  s->add_option("--jobs", sweep.jobs, "Settings trained concurrently")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  std::string run_dir;
  auto* tr = app.add_subcommand("traj", "Write r_traj.csv (step,r,m) next to metrics.csv");
  tr->add_option("RUN_DIR", run_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  if (t->parsed()) return cmd_train(train, out, err);
  if (s->parsed()) return cmd_sweep(sweep, out, err);
  return cmd_traj(run_dir, out, err);
}

}  // namespace abcas::cli
