// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "abcas/data.hpp"
#include "abcas/metrics.hpp"
#include "abcas/random.hpp"
#include "abcas/tensor_file.hpp"

namespace abcas::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) {
    throw ConfigError("key '" + std::string(key) + "': expected a non-negative integer, got '" +
                      std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  const std::string tmp(v);
  char* end = nullptr;
  const double out = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size() || !std::isfinite(out)) {
    throw ConfigError("key '" + std::string(key) + "': expected a number, got '" + tmp + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + std::string(key) + "': expected true/false, got '" + std::string(v) +
                    "'");
}

std::vector<double> parse_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss{std::string(v)};
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) {
    if (!s.empty()) s += ',';
    s += metrics::format_real(x);
  }
  return s;
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

struct KeyDef {
  const char* name;
  std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define ABCAS_UINT_KEY(name, field)                                                          \
  KeyDef {                                                                                   \
    name, [](RunConfig& c, std::string_view k, std::string_view v) {                        \
      c.field = static_cast<decltype(c.field)>(parse_uint(k, v));                            \
    },                                                                                       \
        [](const RunConfig& c) { return std::to_string(c.field); }                           \
  }
#define ABCAS_REAL_KEY(name, field)                                                                \
  KeyDef {                                                                                         \
    name, [](RunConfig& c, std::string_view k, std::string_view v) { c.field = parse_double(k, v); }, \
        [](const RunConfig& c) { return metrics::format_real(c.field); }                           \
  }
#define ABCAS_STRING_KEY(name, field)                                                            \
  KeyDef {                                                                                       \
    name, [](RunConfig& c, std::string_view, std::string_view v) { c.field = std::string(v); }, \
        [](const RunConfig& c) { return c.field; }                                               \
  }

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      ABCAS_UINT_KEY("batch_size", train.batch_size),
      ABCAS_REAL_KEY("lr_d", train.lr_d),
      ABCAS_REAL_KEY("lr_g", train.lr_g),
      ABCAS_REAL_KEY("beta1", train.beta1),
      ABCAS_REAL_KEY("beta2", train.beta2),
      KeyDef{"rectify",
             [](RunConfig& c, std::string_view k, std::string_view v) {
               c.train.rectify = parse_bool(k, v);
             },
             [](const RunConfig& c) { return format_bool(c.train.rectify); }},
      ABCAS_REAL_KEY("alpha", train.alpha),
      ABCAS_REAL_KEY("beta", train.beta),
      KeyDef{"mode",
             [](RunConfig& c, std::string_view k, std::string_view v) {
               if (v == "adaptive") {
                 c.train.mode = control::Mode::adaptive;
               } else if (v == "fixed") {
                 c.train.mode = control::Mode::fixed;
               } else {
                 throw ConfigError("key '" + std::string(k) +
                                   "': expected adaptive or fixed, got '" + std::string(v) + "'");
               }
             },
             [](const RunConfig& c) {
               return std::string(c.train.mode == control::Mode::fixed ? "fixed" : "adaptive");
             }},
      ABCAS_REAL_KEY("m", train.m),
      ABCAS_UINT_KEY("steps", train.steps),
      ABCAS_UINT_KEY("seed", train.seed),
      ABCAS_UINT_KEY("eval_every", train.eval_every),
      ABCAS_UINT_KEY("latent_dim", train.latent_dim),
      ABCAS_STRING_KEY("dataset", dataset),
      ABCAS_UINT_KEY("ring_modes", ring_modes),
      ABCAS_REAL_KEY("ring_radius", ring_radius),
      ABCAS_REAL_KEY("ring_sigma", ring_sigma),
      ABCAS_UINT_KEY("img_size", img_size),
      ABCAS_UINT_KEY("dataset_size", dataset_size),
      ABCAS_STRING_KEY("data_path", data_path),
      ABCAS_STRING_KEY("arch", arch),
      ABCAS_UINT_KEY("g_hidden", g_hidden),
      ABCAS_UINT_KEY("d_hidden", d_hidden),
      ABCAS_UINT_KEY("g_channels", g_channels),
      ABCAS_UINT_KEY("d_channels", d_channels),
      ABCAS_STRING_KEY("g_layers", g_layers),
      ABCAS_STRING_KEY("d_layers", d_layers),
      ABCAS_UINT_KEY("eval_samples", eval_samples),
      ABCAS_UINT_KEY("log_every", log_every),
      KeyDef{"checkpoint",
             [](RunConfig& c, std::string_view k, std::string_view v) {
               c.checkpoint = parse_bool(k, v);
             },
             [](const RunConfig& c) { return format_bool(c.checkpoint); }},
      KeyDef{"sweep_fixed",
             [](RunConfig& c, std::string_view k, std::string_view v) {
               c.sweep_fixed = parse_list(k, v);
             },
             [](const RunConfig& c) { return format_list(c.sweep_fixed); }},
      KeyDef{"sweep_beta",
             [](RunConfig& c, std::string_view k, std::string_view v) {
               c.sweep_beta = parse_list(k, v);
             },
             [](const RunConfig& c) { return format_list(c.sweep_beta); }},
  };
  return table;
}

#undef ABCAS_UINT_KEY
#undef ABCAS_REAL_KEY
#undef ABCAS_STRING_KEY

const KeyDef& find_key(std::string_view key) {
  for (const auto& k : key_table())
    if (key == k.name) return k;
  std::string msg = "unknown config key '" + std::string(key) + "'; valid keys:";
  for (const auto& k : key_table()) msg += std::string(" ") + k.name;
  throw ConfigError(msg);
}

bool is_power_of_two(std::size_t x) { return x && !(x & (x - 1)); }

std::pair<std::string, std::string> preset_layers(const RunConfig& c, const Shape& sample) {
  const std::size_t features = shape_size(sample);
  if (c.arch == "mlp") {
    const std::string h = std::to_string(c.g_hidden);
    const std::string dh = std::to_string(c.d_hidden);
    std::string g = "pixelnorm dense(" + h + ") lrelu(0.2) dense(" + h + ") lrelu(0.2) dense(" + h +
                    ") layernorm relu dense(" + std::to_string(features) + ")";
    if (sample.size() == 3) g += " tanh";
    std::string d = "dense(" + dh + ") relu dense(" + dh + ") relu dense(1)";
    return {g, d};
  }
  if (c.arch == "dcgan") {
    if (sample.size() != 3 || sample[1] != sample[2] || sample[1] < 8 || !is_power_of_two(sample[1])) {
      throw ConfigError("arch 'dcgan' needs square (C, s, s) samples with s a power of two >= 8, got " +
                        shape_string(sample));
    }
    std::size_t stages = 0;
    for (std::size_t s = 4; s < sample[1]; s *= 2) ++stages;
    std::string g = "pixelnorm";
    for (std::size_t i = 0; i < stages; ++i) {
      const std::size_t ch = c.g_channels << (stages - 1 - i);
      g += i == 0 ? " convt(" + std::to_string(ch) + ",4,1,0)"
                  : " convt(" + std::to_string(ch) + ",4,2,1)";
      g += i + 1 == stages ? " layernorm relu" : " lrelu(0.2)";
    }
    g += " convt(" + std::to_string(sample[0]) + ",4,2,1) tanh";
    std::string d;
    for (std::size_t i = 0; i < stages; ++i) {
      d += "conv(" + std::to_string(c.d_channels << i) + ",4,2,1) relu ";
    }
    d += "conv(1,4,1,0)";
    return {g, d};
  }
  if (c.arch == "table256") {
    std::string g =
        "pixelnorm convt(384,4,1,0) lrelu(0.2) convt(192,4,2,1) lrelu(0.2) "
        "convt(96,4,2,1) lrelu(0.2) convt(96,4,2,1) lrelu(0.2) convt(48,4,2,1) lrelu(0.2) "
        "convt(24,4,2,1) layernorm relu convt(3,4,2,1) tanh";
    std::string d =
        "conv(24,4,2,1) relu conv(48,4,2,1) relu conv(96,4,2,1) relu conv(96,4,2,1) relu "
        "conv(192,4,2,1) relu conv(384,4,2,1) relu conv(384,4,1,0) dense(1)";
    return {g, d};
  }
  throw ConfigError("unknown arch '" + c.arch + "' (expected mlp, dcgan or table256)");
}

}  // namespace

const std::vector<std::string>& valid_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& def : key_table()) k.emplace_back(def.name);
    return k;
  }();
  return keys;
}

void set_key(RunConfig& config, std::string_view key, std::string_view value) {
  find_key(key).set(config, key, value);
}

std::string get_key(const RunConfig& config, std::string_view key) {
  return find_key(key).get(config);
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::stringstream ss{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    set_key(config, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_config_text(const RunConfig& config) {
  std::string out;
  for (const auto& k : key_table()) out += std::string(k.name) + " = " + k.get(config) + "\n";
  return out;
}

void validate(const RunConfig& c) {
  try {
    c.train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.dataset != "ring2d" && c.dataset != "blobs" && c.dataset != "file") {
    throw ConfigError("unknown dataset '" + c.dataset + "' (expected ring2d, blobs or file)");
  }
  if (c.dataset == "file" && c.data_path.empty()) throw ConfigError("dataset 'file' needs data_path");
  if (c.eval_samples < 2) throw ConfigError("eval_samples must be at least 2");
  if (c.log_every == 0) throw ConfigError("log_every must be positive");
  for (double m : c.sweep_fixed) {
    if (!(m > 0.0 && m <= 1.0)) throw ConfigError("sweep_fixed values must lie in (0, 1]");
  }
  for (double b : c.sweep_beta) {
    if (!(b > 0.0)) throw ConfigError("sweep_beta values must be positive");
  }
}

Tensor make_dataset(const RunConfig& c) {
  try {
    if (c.dataset == "ring2d") {
      return data::generate_ring2d(
          {c.ring_modes, c.ring_radius, c.ring_sigma, c.dataset_size, derive_seed(c.train.seed, 100)});
    }
    if (c.dataset == "blobs") {
      return data::generate_blobs({c.img_size, c.dataset_size, derive_seed(c.train.seed, 100)});
    }
    if (c.dataset == "file") {
      auto t = data::read_tensor_file(c.data_path);
      if (t.rank() < 2) throw ConfigError("dataset file must be (n, sample...)");
      return t;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const data::TensorFileError& e) {
    throw ConfigError("dataset file " + c.data_path + ": " + e.what());
  }
  throw ConfigError("unknown dataset '" + c.dataset + "'");
}

RunConfig resolve(const RunConfig& config, const Shape& sample_shape) {
  RunConfig out = config;
  if (out.g_layers.empty() || out.d_layers.empty()) {
    auto [g, d] = preset_layers(config, sample_shape);
    if (out.g_layers.empty()) out.g_layers = g;
    if (out.d_layers.empty()) out.d_layers = d;
  }
  return out;
}

std::pair<nn::NetworkSpec, nn::NetworkSpec> make_networks(const RunConfig& config,
                                                          const Shape& sample_shape) {
  const RunConfig r = resolve(config, sample_shape);
  try {
    nn::NetworkSpec g{{config.train.latent_dim}, nn::parse_layers(r.g_layers), false};
    nn::NetworkSpec d{sample_shape, nn::parse_layers(r.d_layers), true};
    return {std::move(g), std::move(d)};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace abcas::cli
