// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace abcas::metrics {

bool MetricsRecord::all_finite() const {
  for (double x : {d_loss, g_loss, dist, dm, r, m, mmd2, wall_ms})
    if (!std::isfinite(x)) return false;
  return true;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_row(const MetricsRecord& rec) {
  std::string s = std::to_string(rec.step) + "," + std::to_string(rec.epoch);
  for (double x : {rec.d_loss, rec.g_loss, rec.dist, rec.dm, rec.r, rec.m, rec.mmd2, rec.wall_ms}) {
    s += ',';
    s += format_real(x);
  }
  return s;
}

MetricsRecord parse_row(std::string_view line) {
  std::vector<std::string> f;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      f.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  f.push_back(cur);
  if (f.size() != 10) {
    throw std::runtime_error("metrics row has " + std::to_string(f.size()) + " fields, expected 10");
  }
  auto real = [&](std::size_t i) {
    std::size_t used = 0;
    const double v = std::stod(f[i], &used);
    if (used != f[i].size()) throw std::runtime_error("bad number '" + f[i] + "' in metrics row");
    return v;
  };
  MetricsRecord r;
  r.step = std::stoull(f[0]);
  r.epoch = std::stoull(f[1]);
  r.d_loss = real(2);
  r.g_loss = real(3);
  r.dist = real(4);
  r.dm = real(5);
  r.r = real(6);
  r.m = real(7);
  r.mmd2 = real(8);
  r.wall_ms = real(9);
  return r;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRecord>& rows) {
  for (const auto& r : rows) {
    if (!r.all_finite()) {
      throw std::runtime_error("non-finite metrics record at step " + std::to_string(r.step));
    }
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricsHeader) throw std::runtime_error(path.string() + ": unexpected header");
  std::vector<MetricsRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_row(line));
  }
  return rows;
}

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

double within_mean(const Tensor64& X, double inv2bw2) {
  const std::size_t n = X.dim(0);
  const std::size_t d = X.stride0();
  const double* p = X.data().data();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s += std::exp(-sq_dist(p + i * d, p + j * d, d) * inv2bw2);
  return 2.0 * s / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double cross_mean(const Tensor64& X, const Tensor64& Y, double inv2bw2) {
  const std::size_t n = X.dim(0), m = Y.dim(0);
  const std::size_t d = X.stride0();
  const double* px = X.data().data();
  const double* py = Y.data().data();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) s += std::exp(-sq_dist(px + i * d, py + j * d, d) * inv2bw2);
  return s / (static_cast<double>(n) * static_cast<double>(m));
}

// Total order on sample sets so the cross term is always summed the same way.
bool canonical_less(const Tensor64& a, const Tensor64& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  if (a.dim(0) != b.dim(0)) return a.dim(0) < b.dim(0);
  return std::lexicographical_compare(a.data().begin(), a.data().end(), b.data().begin(),
                                      b.data().end());
}

}  // namespace

double mmd2_unbiased(const Tensor64& X, const Tensor64& Y, double bandwidth) {
  if (X.rank() < 1 || Y.rank() < 1 || X.dim(0) < 2 || Y.dim(0) < 2) {
    throw std::invalid_argument("mmd2_unbiased needs at least two samples per set");
  }
  if (X.stride0() != Y.stride0()) {
    throw ShapeError("mmd2_unbiased: sample dimensions differ " + shape_string(X.dims()) + " vs " +
                     shape_string(Y.dims()));
  }
  if (!(bandwidth > 0.0)) throw std::invalid_argument("mmd2_unbiased: bandwidth must be positive");

  const double inv2bw2 = 1.0 / (2.0 * bandwidth * bandwidth);
  const bool swap = canonical_less(Y, X);
  const Tensor64& A = swap ? Y : X;
  const Tensor64& B = swap ? X : Y;
  const double wa = within_mean(A, inv2bw2);
  const double wb = within_mean(B, inv2bw2);
  return (wa + wb) - 2.0 * cross_mean(A, B, inv2bw2);
}

double mmd2_unbiased(const Tensor& X, const Tensor& Y, double bandwidth) {
  return mmd2_unbiased(X.cast<double>(), Y.cast<double>(), bandwidth);
}

double median_heuristic_bandwidth(const Tensor64& Z, std::uint64_t seed) {
  if (Z.rank() < 1 || Z.dim(0) < 2) {
    throw std::invalid_argument("median_heuristic_bandwidth needs at least two samples");
  }
  const std::size_t d = Z.stride0();
  std::vector<std::size_t> idx(Z.dim(0));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (idx.size() > kBandwidthExactLimit) {
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(kBandwidthExactLimit);
    std::sort(idx.begin(), idx.end());
  }

  const double* p = Z.data().data();
  std::vector<double> dists;
  dists.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j)
      dists.push_back(std::sqrt(sq_dist(p + idx[i] * d, p + idx[j] * d, d)));

  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  double med = dists[mid];
  if (dists.size() % 2 == 0) {
    const double lower = *std::max_element(dists.begin(), dists.begin() + mid);
    med = 0.5 * (lower + med);
  }
  return std::max(med, kBandwidthFloor);
}

double median_heuristic_bandwidth(const Tensor& Z, std::uint64_t seed) {
  return median_heuristic_bandwidth(Z.cast<double>(), seed);
}

}  // namespace abcas::metrics
