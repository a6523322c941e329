// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "abcas/config.hpp"
#include "abcas/layers.hpp"
#include "abcas/linalg.hpp"
#include "abcas/metrics.hpp"
#include "abcas/random.hpp"
#include "abcas/trainer.hpp"

namespace {

using namespace abcas;

void BM_PowerIterationStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const auto W = normal_tensor<float>({n, n}, rng);
  auto ps = linalg::make_power_iter_state(n, 2);
  for (auto _ : state) {
    ps = linalg::power_iteration_step(W, std::move(ps));
    benchmark::DoNotOptimize(ps.sigma_hat);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_PowerIterationStep)->Arg(64)->Arg(256)->Arg(1024);

void BM_SpectralNormExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  const auto W = normal_tensor<double>({n, n + 8}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::spectral_norm_exact(W));
}
BENCHMARK(BM_SpectralNormExact)->Arg(16)->Arg(32)->Arg(64);

void BM_Conv2dForward(benchmark::State& state) {
  const auto size = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  const auto x = normal_tensor<float>({16, 16, size, size}, rng);
  const auto W = normal_tensor<float>({32, 16, 4, 4}, rng, 0.0, 0.02);
  const Tensor b({32});
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv2d_forward(x, W, b, 2, 1));
}
BENCHMARK(BM_Conv2dForward)->Arg(16)->Arg(32);

void BM_ConvTranspose2dForward(benchmark::State& state) {
  const auto size = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  const auto x = normal_tensor<float>({16, 32, size, size}, rng);
  const auto W = normal_tensor<float>({32, 16, 4, 4}, rng, 0.0, 0.02);
  const Tensor b({16});
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv_transpose2d_forward(x, W, b, 2, 1));
}
BENCHMARK(BM_ConvTranspose2dForward)->Arg(8)->Arg(16);

void BM_Mmd2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(6);
  const auto X = normal_tensor<double>({n, 2}, rng);
  const auto Y = normal_tensor<double>({n, 2}, rng, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::mmd2_unbiased(X, Y, 1.0));
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Mmd2)->RangeMultiplier(4)->Range(256, 4096)->Complexity(benchmark::oNSquared);

void BM_TrainStep(benchmark::State& state) {
  cli::RunConfig config;
  config.arch = state.range(0) == 0 ? "mlp" : "dcgan";
  config.dataset = state.range(0) == 0 ? "ring2d" : "blobs";
  config.dataset_size = 512;
  const Tensor data = cli::make_dataset(config);
  Shape sample(data.dims().begin() + 1, data.dims().end());
  auto [g, d] = cli::make_networks(config, sample);
  train::Trainer trainer(config.train, std::move(g), std::move(d), data);
  for (auto _ : state) benchmark::DoNotOptimize(trainer.step());
}
BENCHMARK(BM_TrainStep)->Arg(0)->Arg(1)->ArgNames({"dcgan"})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
