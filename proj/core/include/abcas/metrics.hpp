// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "abcas/tensor.hpp"

namespace abcas::metrics {

/// One row of metrics.csv. Columns not produced by a given step (g_loss on a
/// discriminator step, mmd2 between evaluations) carry their latest value.
struct MetricsRecord {
  std::uint64_t step = 0;
  std::uint64_t epoch = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double dist = 0.0;
  double dm = 0.0;
  double r = 0.0;
  double m = 1.0;
  double mmd2 = 0.0;
  double wall_ms = 0.0;

  bool all_finite() const;
  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

inline constexpr std::string_view kMetricsHeader =
    "step,epoch,d_loss,g_loss,dist,dm,r,m,mmd2,wall_ms";

/// Shortest-exact ("%.17g") decimal form used for every CSV field.
std::string format_real(double x);

std::string format_row(const MetricsRecord& rec);
MetricsRecord parse_row(std::string_view line);

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRecord>& rows);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

/// Squared MMD, unbiased U-statistic, Gaussian kernel
/// k(a, b) = exp(-|a - b|^2 / (2 bw^2)). Rows of X and Y are samples (any
/// trailing shape is flattened). Needs at least two samples on each side.
/// Symmetric in (X, Y) bit for bit.
double mmd2_unbiased(const Tensor64& X, const Tensor64& Y, double bandwidth);
double mmd2_unbiased(const Tensor& X, const Tensor& Y, double bandwidth);

inline constexpr double kBandwidthFloor = 1e-6;
inline constexpr std::size_t kBandwidthExactLimit = 2048;

/// Median pairwise Euclidean distance over the rows of Z (floored at 1e-6).
/// Above 2048 rows a seeded subsample of 2048 rows is used.
double median_heuristic_bandwidth(const Tensor64& Z, std::uint64_t seed = 0);
double median_heuristic_bandwidth(const Tensor& Z, std::uint64_t seed = 0);

}  // namespace abcas::metrics
