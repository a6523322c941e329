// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "abcas/data.hpp"
#include "abcas/tensor_file.hpp"
#include "oracles.hpp"

using namespace abcas;
using namespace abcas::data;

namespace {

TensorFileErrc decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_tensor(bytes);
  } catch (const TensorFileError& e) {
    return e.code();
  }
  FAIL("decode unexpectedly succeeded");
  return TensorFileErrc::io;
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

TEST_SUITE("data") {
  TEST_CASE("ring2d is deterministic and shaped") {
    const Ring2dSpec spec{8, 0.8, 0.05, 500, 3};
    const auto a = generate_ring2d(spec);
    CHECK(a.dims() == Shape{500, 2});
    CHECK(a == generate_ring2d(spec));
    auto other = spec;
    other.seed = 4;
    CHECK_FALSE(a == generate_ring2d(other));
  }

  TEST_CASE("single narrow mode sits at (radius, 0)") {
    const auto t = generate_ring2d({1, 1.5, 1e-6, 100, 1});
    for (std::size_t i = 0; i < 100; ++i) {
      CHECK(t.at(i, 0) == doctest::Approx(1.5).epsilon(1e-5));
      CHECK(std::fabs(t.at(i, 1)) < 1e-4);
    }
  }

  TEST_CASE("eight-mode ring is centred") {
    const std::size_t n = 20000;
    const double radius = 2.0, sigma = 0.05;
    const auto t = generate_ring2d({8, radius, sigma, n, 11});
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += t.at(i, 0);
      my += t.at(i, 1);
    }
    mx /= n;
    my /= n;
    // Per-coordinate std of the mixture is sqrt(radius^2 / 2 + sigma^2).
    const double sd = std::sqrt(radius * radius / 2 + sigma * sigma);
    CHECK(std::fabs(mx) < 3 * sd / std::sqrt(double(n)));
    CHECK(std::fabs(my) < 3 * sd / std::sqrt(double(n)));
  }

  TEST_CASE("ring2d spec validation") {
    CHECK_THROWS(generate_ring2d({0, 1.0, 0.1, 10, 0}));
    CHECK_THROWS(generate_ring2d({8, 1.0, 0.0, 10, 0}));
  }

  TEST_CASE("blobs range, shape and determinism") {
    for (std::size_t s : {8u, 16u, 32u}) {
      const BlobsSpec spec{s, 50, 2};
      const auto t = generate_blobs(spec);
      CHECK(t.dims() == Shape{50, 1, s, s});
      CHECK(t.all_finite());
      for (float v : t.data()) {
        CHECK(v >= -1.0f);
        CHECK(v <= 1.0f);
      }
      CHECK(t == generate_blobs(spec));
    }
    CHECK_THROWS(generate_blobs({12, 10, 0}));
  }

  TEST_CASE("blob peak sits at the sampled centre") {
    const BlobsSpec spec{16, 20, 7};
    const auto t = generate_blobs(spec);
    const auto centers = blob_centers(spec);
    for (std::size_t i = 0; i < 20; ++i) {
      std::size_t best = 0;
      for (std::size_t p = 1; p < 256; ++p)
        if (t[i * 256 + p] > t[i * 256 + best]) best = p;
      const double px = best % 16 + 0.5, py = best / 16 + 0.5;
      CHECK(std::fabs(px - centers[i].first) <= 0.5 + 1e-9);
      CHECK(std::fabs(py - centers[i].second) <= 0.5 + 1e-9);
    }
  }

  TEST_CASE("blob centres are uniform over a 4x4 grid") {
    const BlobsSpec spec{16, 1000, 5};
    const auto centers = blob_centers(spec);
    std::vector<double> counts(16, 0.0);
    for (const auto& [x, y] : centers) {
      const auto cx = std::min<std::size_t>(3, static_cast<std::size_t>(x / 4));
      const auto cy = std::min<std::size_t>(3, static_cast<std::size_t>(y / 4));
      counts[cy * 4 + cx] += 1;
    }
    double chi2 = 0;
    for (double c : counts) chi2 += (c - 62.5) * (c - 62.5) / 62.5;
    // Upper 0.001 quantile of chi-square with 15 degrees of freedom.
    CHECK(chi2 < 37.697);
  }

  TEST_CASE("tensor file round trip") {
    const Tensor t({3, 2}, {1.5f, -0.0f, 3e-38f, 7.0f, -2.25f, 1e30f});
    const auto bytes = encode_tensor(t);
    CHECK(bytes.size() == 6 + 8 + 24);
    CHECK(bytes[0] == 'A');
    CHECK(bytes[3] == '1');
    CHECK(bytes[6] == 3);
    const auto back = decode_tensor(bytes);
    CHECK(back.dims() == t.dims());
    CHECK(std::memcmp(back.data().data(), t.data().data(), 24) == 0);

    const auto dir = std::filesystem::path(testing::scratch_dir("abt"));
    write_tensor_file(dir / "t.abt", t);
    CHECK(read_tensor_file(dir / "t.abt") == t);
  }

  TEST_CASE("tensor file error kinds") {
    const auto good = encode_tensor(Tensor({2}, {1.0f, 2.0f}));
    auto bad = good;
    bad[0] = 'X';
    CHECK(decode_error(bad) == TensorFileErrc::bad_magic);
    bad = good;
    bad[4] = 1;
    CHECK(decode_error(bad) == TensorFileErrc::unknown_dtype);
    bad = good;
    bad.pop_back();
    CHECK(decode_error(bad) == TensorFileErrc::truncated);
    bad = good;
    bad.push_back(0);
    CHECK(decode_error(bad) == TensorFileErrc::trailing_bytes);
    CHECK(decode_error({'A', 'B'}) == TensorFileErrc::truncated);

    std::vector<std::uint8_t> zero{'A', 'B', 'T', '1', 0, 1};
    put_u32(zero, 0);
    CHECK(decode_error(zero) == TensorFileErrc::bad_extents);

    std::vector<std::uint8_t> huge{'A', 'B', 'T', '1', 0, 2};
    put_u32(huge, 65536);
    put_u32(huge, 32769);
    CHECK(decode_error(huge) == TensorFileErrc::extent_overflow);

    Tensor nan({1}, {std::numeric_limits<float>::quiet_NaN()});
    CHECK_THROWS_AS(encode_tensor(nan), TensorFileError);
    CHECK_THROWS_AS(read_tensor_file("/nonexistent/dir/x.abt"), TensorFileError);
  }
}
