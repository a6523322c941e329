// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0
//
// ABT1 binary tensor format (all integers and scalars little-endian):
//
//   offset  size        field
//   0       4           magic "ABT1"
//   4       1           dtype (0 = float32)
//   5       1           ndim (>= 1)
//   6       4 * ndim    extents, u32 each, all > 0
//   ...     4 * prod    row-major payload
//
// The element count is capped at 2^31.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "abcas/tensor.hpp"

namespace abcas::data {

enum class TensorFileErrc {
  io,
  bad_magic,
  unknown_dtype,
  truncated,
  trailing_bytes,
  bad_extents,
  extent_overflow,
  non_finite,
};

std::string_view errc_name(TensorFileErrc code);

class TensorFileError : public std::runtime_error {
 public:
  TensorFileError(TensorFileErrc code, const std::string& detail);
  TensorFileErrc code() const noexcept { return code_; }

 private:
  TensorFileErrc code_;
};

inline constexpr std::uint64_t kMaxTensorElements = std::uint64_t{1} << 31;

std::vector<std::uint8_t> encode_tensor(const Tensor& t);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor_file(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor_file(const std::filesystem::path& path);

}  // namespace abcas::data
