// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0
//
// Flat "key = value" run configuration ('#' starts a comment).

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "abcas/network.hpp"
#include "abcas/tensor.hpp"
#include "abcas/trainer.hpp"

namespace abcas::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  train::TrainConfig train;

  // dataset
  std::string dataset = "ring2d";  // ring2d | blobs | file
  std::size_t ring_modes = 8;
  double ring_radius = 0.8;
  double ring_sigma = 0.05;
  std::size_t img_size = 16;
  std::size_t dataset_size = 4096;
  std::string data_path;

  // architecture
  std::string arch = "mlp";  // mlp | dcgan | table256
  std::size_t g_hidden = 64;
  std::size_t d_hidden = 64;
  std::size_t g_channels = 16;
  std::size_t d_channels = 16;
  std::string g_layers;  // explicit layer lists override the preset
  std::string d_layers;

  // evaluation and logging
  std::size_t eval_samples = 1024;
  std::uint64_t log_every = 1;
  bool checkpoint = true;

  // sweep points
  std::vector<double> sweep_fixed{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> sweep_beta{1.0, 4.0};
};

/// Every accepted key, in canonical order.
const std::vector<std::string>& valid_keys();

/// Sets one key; throws ConfigError for unknown keys (listing the valid ones)
/// and for unparsable values.
void set_key(RunConfig& config, std::string_view key, std::string_view value);
std::string get_key(const RunConfig& config, std::string_view key);

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Every key with its current value, one per line; parse_config of the
/// result reproduces `config`.
std::string to_config_text(const RunConfig& config);

/// Checks cross-field constraints (and TrainConfig::validate); ConfigError.
void validate(const RunConfig& config);

/// Real data for the configured dataset, (n, sample...).
Tensor make_dataset(const RunConfig& config);

/// Generator/discriminator layer lists, from the preset unless given
/// explicitly. The discriminator is spectrally normalized.
std::pair<nn::NetworkSpec, nn::NetworkSpec> make_networks(const RunConfig& config,
                                                          const Shape& sample_shape);

/// Copy of `config` with g_layers / d_layers materialized from the preset.
RunConfig resolve(const RunConfig& config, const Shape& sample_shape);

}  // namespace abcas::cli
