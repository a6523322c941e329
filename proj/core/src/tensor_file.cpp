// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/tensor_file.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

namespace abcas::data {

namespace {

constexpr std::uint8_t kMagic[4] = {'A', 'B', 'T', '1'};
constexpr std::uint8_t kDtypeF32 = 0;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[off + i]) << (8 * i);
  return v;
}

}  // namespace

std::string_view errc_name(TensorFileErrc code) {
  switch (code) {
    case TensorFileErrc::io: return "io error";
    case TensorFileErrc::bad_magic: return "bad magic";
    case TensorFileErrc::unknown_dtype: return "unknown dtype";
    case TensorFileErrc::truncated: return "truncated payload";
    case TensorFileErrc::trailing_bytes: return "trailing bytes";
    case TensorFileErrc::bad_extents: return "bad extents";
    case TensorFileErrc::extent_overflow: return "extent overflow";
    case TensorFileErrc::non_finite: return "non-finite payload";
  }
  return "unknown";
}

TensorFileError::TensorFileError(TensorFileErrc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + (detail.empty() ? "" : ": " + detail)),
      code_(code) {}

std::vector<std::uint8_t> encode_tensor(const Tensor& t) {
  if (t.rank() == 0 || t.rank() > 255) {
    throw TensorFileError(TensorFileErrc::bad_extents, "rank " + std::to_string(t.rank()));
  }
  if (t.size() > kMaxTensorElements) {
    throw TensorFileError(TensorFileErrc::extent_overflow, shape_string(t.dims()));
  }
  if (!t.all_finite()) throw TensorFileError(TensorFileErrc::non_finite, "refusing to write");

  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kDtypeF32);
  out.push_back(static_cast<std::uint8_t>(t.rank()));
  for (auto d : t.dims()) put_u32(out, static_cast<std::uint32_t>(d));
  out.reserve(out.size() + 4 * t.size());
  for (float x : t.data()) put_u32(out, std::bit_cast<std::uint32_t>(x));
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 6) throw TensorFileError(TensorFileErrc::truncated, "header too short");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw TensorFileError(TensorFileErrc::bad_magic, "");
  }
  if (bytes[4] != kDtypeF32) {
    throw TensorFileError(TensorFileErrc::unknown_dtype, "code " + std::to_string(bytes[4]));
  }
  const std::size_t ndim = bytes[5];
  if (ndim == 0) throw TensorFileError(TensorFileErrc::bad_extents, "ndim is 0");
  const std::size_t header = 6 + 4 * ndim;
  if (bytes.size() < header) throw TensorFileError(TensorFileErrc::truncated, "extents cut short");

  Shape dims(ndim);
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    dims[i] = get_u32(bytes, 6 + 4 * i);
    if (dims[i] == 0) throw TensorFileError(TensorFileErrc::bad_extents, "zero extent");
    count *= dims[i];
    if (count > kMaxTensorElements) {
      throw TensorFileError(TensorFileErrc::extent_overflow, "element count exceeds 2^31");
    }
  }

  const std::uint64_t need = header + 4 * count;
  if (bytes.size() < need) {
    throw TensorFileError(TensorFileErrc::truncated, "expected " + std::to_string(need) +
                                                         " bytes, got " +
                                                         std::to_string(bytes.size()));
  }
  if (bytes.size() > need) throw TensorFileError(TensorFileErrc::trailing_bytes, "");

  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<float>(get_u32(bytes, header + 4 * i));
  }
  return Tensor(std::move(dims), std::move(values));
}

void write_tensor_file(const std::filesystem::path& path, const Tensor& t) {
  const auto bytes = encode_tensor(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TensorFileError(TensorFileErrc::io, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw TensorFileError(TensorFileErrc::io, "write failed for " + path.string());
}

Tensor read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TensorFileError(TensorFileErrc::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_tensor(bytes);
}

}  // namespace abcas::data
