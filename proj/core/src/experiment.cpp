// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "abcas/metrics.hpp"
#include "abcas/random.hpp"
#include "abcas/tensor_file.hpp"
#include "abcas/trainer.hpp"

#ifndef ABCAS_VERSION
#define ABCAS_VERSION "v0.0.0-unknown"
#endif

namespace abcas::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

Tensor select_rows(const Tensor& data, std::size_t count, std::uint64_t seed) {
  const std::size_t n = data.dim(0);
  const std::size_t stride = data.stride0();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (count < n) {
    Rng rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(count);
  }
  Shape dims = data.dims();
  dims[0] = idx.size();
  std::vector<float> values;
  values.reserve(idx.size() * stride);
  const auto src = data.data();
  for (std::size_t i : idx) {
    values.insert(values.end(), src.begin() + i * stride, src.begin() + (i + 1) * stride);
  }
  return Tensor(std::move(dims), std::move(values));
}

void save_checkpoint(const fs::path& path, nn::Network<float>& net) {
  auto flat = nn::flatten_parameters(net);
  if (flat.empty()) return;
  const std::size_t n = flat.size();
  data::write_tensor_file(path, Tensor({n}, std::move(flat)));
}

std::string format_setting_value(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

class Logger {
 public:
  explicit Logger(std::ostream* out) : out_(out) {}
  void line(const std::string& s) {
    if (!out_) return;
    std::lock_guard lock(mu_);
    *out_ << s << '\n' << std::flush;
  }

 private:
  std::ostream* out_;
  std::mutex mu_;
};

RunResult run_training_impl(const RunConfig& config, const fs::path& out_dir, Logger& log) {
  RunResult result;
  fs::create_directories(out_dir);
  const fs::path status_path = out_dir / "status.txt";

  RunConfig resolved;
  Tensor dataset;
  std::unique_ptr<train::Trainer> trainer;
  try {
    validate(config);
    dataset = make_dataset(config);
    const Shape sample(dataset.dims().begin() + 1, dataset.dims().end());
    resolved = resolve(config, sample);
    auto [g, d] = make_networks(resolved, sample);

    std::string manifest = "# abcas run manifest\n# version: " + version_string() +
                           "\n# seed: " + std::to_string(config.train.seed) +
                           "\n# sample shape: " + shape_string(sample) +
                           "\n# files: manifest.cfg metrics.csv checkpoint_G.abt checkpoint_D.abt "
                           "samples.abt status.txt\n";
    manifest += to_config_text(resolved);
    write_text(out_dir / "manifest.cfg", manifest);
    write_text(status_path, "running\n");

    trainer = std::make_unique<train::Trainer>(resolved.train, std::move(g), std::move(d),
                                               std::move(dataset));
  } catch (const ConfigError& e) {
    result = {kExitConfig, e.what(), 0, 0.0};
  } catch (const std::invalid_argument& e) {  // includes ShapeError
    result = {kExitConfig, e.what(), 0, 0.0};
  }
  if (!trainer) {
    write_text(status_path, "config_error " + result.message + "\n");
    log.line("config error: " + result.message);
    return result;
  }

  const auto& tc = resolved.train;
  const Tensor& data = trainer->dataset();
  const Tensor real_eval =
      select_rows(data, std::min(resolved.eval_samples, data.dim(0)), derive_seed(tc.seed, 200));
  Rng z_rng(derive_seed(tc.seed, 201));
  const Tensor z_eval = trainer->sample_latent(real_eval.dim(0), z_rng);
  const double bandwidth = metrics::median_heuristic_bandwidth(real_eval, tc.seed);

  std::ofstream csv(out_dir / "metrics.csv", std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write " + (out_dir / "metrics.csv").string());
  csv << metrics::kMetricsHeader << '\n';

  try {
    trainer->evaluate(real_eval, z_eval, bandwidth);
    metrics::MetricsRecord rec = trainer->last_record();
    csv << metrics::format_row(rec) << '\n';
    log.line(out_dir.filename().string() + " step 0 mmd2 " + metrics::format_real(rec.mmd2));

    for (std::uint64_t s = 1; s <= tc.steps; ++s) {
      rec = trainer->step();
      const bool eval = s % tc.eval_every == 0 || s == tc.steps;
      if (eval) {
        trainer->evaluate(real_eval, z_eval, bandwidth);
        rec.mmd2 = trainer->last_record().mmd2;
        if (resolved.checkpoint) {
          save_checkpoint(out_dir / "checkpoint_G.abt", trainer->generator());
          save_checkpoint(out_dir / "checkpoint_D.abt", trainer->discriminator());
        }
        log.line(out_dir.filename().string() + " step " + std::to_string(s) + " mmd2 " +
                 metrics::format_real(rec.mmd2) + " r " + metrics::format_real(rec.r) + " m " +
                 metrics::format_real(rec.m));
      }
      if (eval || s % resolved.log_every == 0) csv << metrics::format_row(rec) << '\n';
      result.steps_done = s;
    }
    result.final_mmd2 = rec.mmd2;
    csv.flush();
    data::write_tensor_file(out_dir / "samples.abt", trainer->generate(z_eval));
  } catch (const train::NumericAbort& e) {
    csv.flush();
    result.exit_code = kExitNumeric;
    result.message = e.what();
    write_text(status_path, "aborted step " + std::to_string(e.step()) + ": " + e.what() + "\n");
    log.line(out_dir.filename().string() + " numeric abort: " + e.what());
    return result;
  }
  write_text(status_path, "done\n");
  return result;
}

}  // namespace

std::string version_string() { return ABCAS_VERSION; }

RunResult run_training(const RunConfig& config, const fs::path& out_dir, std::ostream* log) {
  Logger logger(log);
  return run_training_impl(config, out_dir, logger);
}

std::vector<SweepSetting> sweep_settings(const RunConfig& config) {
  std::vector<SweepSetting> out;
  for (double m : config.sweep_fixed) {
    out.push_back({"fixed_m" + format_setting_value(m), control::Mode::fixed, m,
                   config.train.beta});
  }
  for (double b : config.sweep_beta) {
    out.push_back({"abcas_beta" + format_setting_value(b), control::Mode::adaptive, 1.0, b});
  }
  return out;
}

RunConfig apply_setting(const RunConfig& config, const SweepSetting& setting) {
  RunConfig c = config;
  c.train.mode = setting.mode;
  c.train.m = setting.m;
  c.train.beta = setting.beta;
  return c;
}

std::string read_status(const fs::path& run_dir) {
  std::ifstream in(run_dir / "status.txt");
  std::string word;
  if (!in || !(in >> word)) return "missing";
  return word;
}

SweepRow summarize_run(const fs::path& run_dir, const SweepSetting& setting) {
  SweepRow row;
  row.setting = setting;
  row.status = read_status(run_dir);
  const fs::path csv = run_dir / "metrics.csv";
  if (!fs::exists(csv)) return row;
  const auto rows = metrics::read_metrics_csv(csv);
  if (rows.empty()) return row;
  row.best_mmd2 = rows.front().mmd2;
  row.best_step = rows.front().step;
  for (const auto& r : rows) {
    if (r.mmd2 < row.best_mmd2) {
      row.best_mmd2 = r.mmd2;
      row.best_step = r.step;
    }
  }
  row.final_mmd2 = rows.back().mmd2;
  return row;
}

int run_sweep(const RunConfig& config, const fs::path& out_dir, bool resume, unsigned jobs,
              std::ostream* log) {
  Logger logger(log);
  try {
    validate(config);
  } catch (const ConfigError& e) {
    logger.line(std::string("config error: ") + e.what());
    return kExitConfig;
  }
  const auto settings = sweep_settings(config);
  if (settings.empty()) {
    logger.line("config error: sweep has no settings");
    return kExitConfig;
  }
  fs::create_directories(out_dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < settings.size(); i = next++) {
      const fs::path dir = out_dir / settings[i].name;
      if (resume && read_status(dir) == "done") {
        logger.line(settings[i].name + " already done, skipping");
        continue;
      }
      try {
        run_training_impl(apply_setting(config, settings[i]), dir, logger);
      } catch (const std::exception& e) {
        write_text(dir / "status.txt", std::string("failed ") + e.what() + "\n");
        logger.line(settings[i].name + " failed: " + e.what());
      }
    }
  };
  jobs = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(settings.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::string summary = std::string(kSummaryHeader) + "\n";
  for (const auto& s : settings) {
    const SweepRow row = summarize_run(out_dir / s.name, s);
    summary += s.name + "," + (s.mode == control::Mode::fixed ? "fixed" : "adaptive") + "," +
               metrics::format_real(s.m) + "," + metrics::format_real(s.beta) + "," +
               metrics::format_real(row.best_mmd2) + "," + std::to_string(row.best_step) + "," +
               metrics::format_real(row.final_mmd2) + "," + row.status + "\n";
  }
  write_text(out_dir / "summary.csv", summary);
  return kExitOk;
}

fs::path extract_trajectory(const fs::path& run_dir) {
  const fs::path src = run_dir / "metrics.csv";
  std::ifstream in(src);
  if (!in) throw std::runtime_error("cannot open " + src.string());

  const fs::path dst = run_dir / "r_traj.csv";
  std::ofstream out(dst, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + dst.string());
  out << "step,r,m\n";

  std::string line;
  if (!std::getline(in, line)) return dst;  // empty file: header-only output
  const auto header = split_csv(line);
  auto column = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw std::runtime_error(src.string() + ": header lacks column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_step = column("step"), c_r = column("r"), c_m = column("m");

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) {
      throw std::runtime_error(src.string() + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(f.size()));
    }
    out << f[c_step] << ',' << f[c_r] << ',' << f[c_m] << '\n';
  }
  return dst;
}

}  // namespace abcas::cli
