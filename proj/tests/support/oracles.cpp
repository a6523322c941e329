// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "abcas/losses.hpp"
#include "abcas/specnorm.hpp"

namespace abcas::testing {

std::vector<double> hestenes_singular_values(std::span<const double> a, std::size_t rows,
                                             std::size_t cols) {
  // Work on columns of A (or of A^T when it has fewer columns).
  const bool tr = cols > rows;
  const std::size_t m = tr ? cols : rows;
  const std::size_t n = tr ? rows : cols;
  std::vector<long double> u(m * n);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const long double x = a[i * cols + j];
      if (tr) u[j * n + i] = x; else u[i * n + j] = x;
    }

  for (int sweep = 0; sweep < 200; ++sweep) {
    long double off = 0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        long double alpha = 0, beta = 0, gamma = 0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += u[i * n + p] * u[i * n + p];
          beta += u[i * n + q] * u[i * n + q];
          gamma += u[i * n + p] * u[i * n + q];
        }
        if (alpha == 0 || beta == 0) continue;
        off = std::max(off, std::fabs(gamma) / std::sqrt(alpha * beta));
        if (gamma == 0) continue;
        const long double zeta = (beta - alpha) / (2 * gamma);
        const long double t =
            (zeta >= 0 ? 1 : -1) / (std::fabs(zeta) + std::sqrt(1 + zeta * zeta));
        const long double c = 1 / std::sqrt(1 + t * t);
        const long double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const long double up = u[i * n + p];
          const long double uq = u[i * n + q];
          u[i * n + p] = c * up - s * uq;
          u[i * n + q] = s * up + c * uq;
        }
      }
    }
    if (off < 1e-17L) break;
  }

  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) {
    long double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += u[i * n + j] * u[i * n + j];
    sv[j] = static_cast<double>(std::sqrt(s));
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

double hestenes_spectral_norm(const Tensor64& W) {
  const std::size_t rows = W.dim(0);
  const std::size_t cols = W.size() / rows;
  return hestenes_singular_values(W.data(), rows, cols).front();
}

Tensor64 gapped_matrix(std::size_t rows, std::size_t cols, double gap, Rng& rng) {
  for (;;) {
    Tensor64 W = normal_tensor<double>({rows, cols}, rng);
    const auto sv = hestenes_singular_values(W.data(), rows, cols);
    if (sv.size() < 2 || sv[1] <= (1.0 - gap) * sv[0]) return W;
  }
}

Tensor64 naive_conv2d(const Tensor64& x, const Tensor64& W, const Tensor64& b, std::size_t stride,
                      std::size_t pad) {
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), Wd = x.dim(3);
  const std::size_t O = W.dim(0), K = W.dim(2);
  const std::size_t OH = (H + 2 * pad - K) / stride + 1;
  const std::size_t OW = (Wd + 2 * pad - K) / stride + 1;
  Tensor64 y({N, O, OH, OW});
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t o = 0; o < O; ++o)
      for (std::size_t oy = 0; oy < OH; ++oy)
        for (std::size_t ox = 0; ox < OW; ++ox) {
          double acc = b[o];
          for (std::size_t c = 0; c < C; ++c)
            for (std::size_t ky = 0; ky < K; ++ky)
              for (std::size_t kx = 0; kx < K; ++kx) {
                const long iy = static_cast<long>(oy * stride + ky) - static_cast<long>(pad);
                const long ix = static_cast<long>(ox * stride + kx) - static_cast<long>(pad);
                if (iy < 0 || ix < 0 || iy >= static_cast<long>(H) || ix >= static_cast<long>(Wd))
                  continue;
                acc += x[((n * C + c) * H + iy) * Wd + ix] * W[((o * C + c) * K + ky) * K + kx];
              }
          y[((n * O + o) * OH + oy) * OW + ox] = acc;
        }
  return y;
}

Tensor64 naive_conv_transpose2d(const Tensor64& x, const Tensor64& W, const Tensor64& b,
                                std::size_t stride, std::size_t pad) {
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), Wd = x.dim(3);
  const std::size_t O = W.dim(1), K = W.dim(2);
  const std::size_t OH = (H - 1) * stride + K - 2 * pad;
  const std::size_t OW = (Wd - 1) * stride + K - 2 * pad;
  Tensor64 y({N, O, OH, OW});
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t o = 0; o < O; ++o)
      for (std::size_t i = 0; i < OH * OW; ++i) y[(n * O + o) * OH * OW + i] = b[o];
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t iy = 0; iy < H; ++iy)
        for (std::size_t ix = 0; ix < Wd; ++ix)
          for (std::size_t o = 0; o < O; ++o)
            for (std::size_t ky = 0; ky < K; ++ky)
              for (std::size_t kx = 0; kx < K; ++kx) {
                const long oy = static_cast<long>(iy * stride + ky) - static_cast<long>(pad);
                const long ox = static_cast<long>(ix * stride + kx) - static_cast<long>(pad);
                if (oy < 0 || ox < 0 || oy >= static_cast<long>(OH) || ox >= static_cast<long>(OW))
                  continue;
                y[((n * O + o) * OH + oy) * OW + ox] +=
                    x[((n * C + c) * H + iy) * Wd + ix] * W[((c * O + o) * K + ky) * K + kx];
              }
  return y;
}

namespace {

double kernel(const Tensor64& A, std::size_t i, const Tensor64& B, std::size_t j, double bw) {
  const std::size_t d = A.stride0();
  double s = 0;
  for (std::size_t k = 0; k < d; ++k) {
    const double t = A[i * d + k] - B[j * d + k];
    s += t * t;
  }
  return std::exp(-s / (2 * bw * bw));
}

}  // namespace

double brute_mmd2(const Tensor64& X, const Tensor64& Y, double bw) {
  const std::size_t n = X.dim(0), m = Y.dim(0);
  double xx = 0, yy = 0, xy = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) xx += kernel(X, i, X, j, bw);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) yy += kernel(Y, i, Y, j, bw);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) xy += kernel(X, i, Y, j, bw);
  return xx / (n * (n - 1.0)) + yy / (m * (m - 1.0)) - 2 * xy / (double(n) * m);
}

double brute_median_distance(const Tensor64& Z) {
  const std::size_t n = Z.dim(0), d = Z.stride0();
  std::vector<double> dist;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < d; ++k) s += (Z[i * d + k] - Z[j * d + k]) * (Z[i * d + k] - Z[j * d + k]);
      dist.push_back(std::sqrt(s));
    }
  std::sort(dist.begin(), dist.end());
  const std::size_t c = dist.size();
  const double med = c % 2 ? dist[c / 2] : 0.5 * (dist[c / 2 - 1] + dist[c / 2]);
  return std::max(med, 1e-6);
}

double rel_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("rel_error: size mismatch");
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double den = std::sqrt(std::max(na, nb));
  return den == 0 ? 0 : std::sqrt(d) / den;
}

std::vector<double> fd_gradient(const std::function<double()>& f, std::span<double> params,
                                double h) {
  std::vector<double> g(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + h;
    const double fp = f();
    params[i] = keep - h;
    const double fm = f();
    params[i] = keep;
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

namespace {

// Keeps samples away from the ReLU kink so central differences stay valid.
void push_from_zero(Tensor64& t) {
  for (auto& x : t.data()) x = x >= 0 ? x + 0.1 : x - 0.1;
}

double weighted_sum(const Tensor64& y, const Tensor64& r) {
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
  return s;
}

double check_network(nn::Network<double>& net, Tensor64 x, double m, Rng& rng) {
  net.reapply_spectral(m);
  Shape out_dims{x.dim(0)};
  const auto& os = net.output_shape();
  out_dims.insert(out_dims.end(), os.begin(), os.end());
  const Tensor64 R = normal_tensor<double>(out_dims, rng);

  net.params().zero_grad();
  auto [y, tape] = net.forward(x);
  const Tensor64 dx = net.backward(tape, R);

  double worst = 0;
  auto loss = [&] { return weighted_sum(net.predict(x), R); };
  worst = std::max(worst, rel_error(dx.data(), fd_gradient(loss, x.data())));

  for (auto& layer : net.params().layers) {
    for (auto pair : {std::pair{&layer.weight, &layer.grad_weight},
                       std::pair{&layer.bias, &layer.grad_bias}}) {
      if (pair.first->empty()) continue;
      auto loss_p = [&] {
        net.reapply_spectral(m);
        return weighted_sum(net.predict(x), R);
      };
      const auto fd = fd_gradient(loss_p, pair.first->data());
      net.reapply_spectral(m);
      worst = std::max(worst, rel_error(pair.second->data(), fd));
    }
  }
  return worst;
}

}  // namespace

double gradcheck_layer(const nn::LayerSpec& layer, const Shape& sample, std::size_t batch,
                       std::uint64_t seed) {
  Rng rng(seed);
  nn::Network<double> net({sample, {layer}, false}, seed);
  for (auto& l : net.params().layers) {
    for (auto* t : {&l.weight, &l.bias}) {
      if (t->empty()) continue;
      *t = normal_tensor<double>(t->dims(), rng, 0.0, 0.5);
      if (layer.kind == nn::LayerKind::layernorm && t == &l.weight) {
        for (auto& g : t->data()) g += 1.0;
      }
    }
  }
  Shape xd{batch};
  xd.insert(xd.end(), sample.begin(), sample.end());
  Tensor64 x = normal_tensor<double>(xd, rng);
  push_from_zero(x);
  return check_network(net, std::move(x), 1.0, rng);
}

double gradcheck_network(const nn::NetworkSpec& spec, std::size_t batch, double m,
                         std::uint64_t seed) {
  Rng rng(seed);
  nn::Network<double> net(spec, seed);
  for (auto& l : net.params().layers) {
    if (!l.weight.empty() && l.weight.rank() > 1) {
      l.weight = normal_tensor<double>(l.weight.dims(), rng, 0.0, 0.3);
    }
    if (!l.bias.empty()) l.bias = normal_tensor<double>(l.bias.dims(), rng, 0.0, 0.1);
  }
  for (int i = 0; i < 20; ++i) net.refresh_spectral(m);
  Shape xd{batch};
  xd.insert(xd.end(), spec.input.begin(), spec.input.end());
  Tensor64 x = normal_tensor<double>(xd, rng);
  return check_network(net, std::move(x), m, rng);
}

double gradcheck_spectral_backward(std::size_t rows, std::size_t cols, double m,
                                   std::uint64_t seed) {
  Rng rng(seed);
  Tensor64 W = normal_tensor<double>({rows, cols}, rng);
  const Tensor64 G = normal_tensor<double>({rows, cols}, rng);
  auto state = sn::make_state(rows, seed, m);
  for (int i = 0; i < 5; ++i) sn::refresh(state, W);

  const Tensor64 analytic = sn::backward_through_norm(state, W, G);
  auto loss = [&] {
    auto s = state;
    sn::rescale_frozen(s, W);
    return weighted_sum(sn::normalized_weight(s, W), G);
  };
  return rel_error(analytic.data(), fd_gradient(loss, W.data()));
}

double gradcheck_d_loss(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> c(2 * n);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (auto& v : c) v = nd(rng);
  const std::span<double> real(c.data(), n), fake(c.data() + n, n);
  const auto g = train::d_loss_grad(real, fake);
  std::vector<double> analytic = g.d_real;
  analytic.insert(analytic.end(), g.d_fake.begin(), g.d_fake.end());
  return rel_error(analytic, fd_gradient([&] { return train::d_loss(real, fake); }, c));
}

double gradcheck_g_loss(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> c(n);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (auto& v : c) v = nd(rng);
  const auto g = train::g_loss_grad(c);
  return rel_error(g.d_fake, fd_gradient([&] { return train::g_loss(c); }, c));
}

std::vector<double> replay_dm(std::span<const double> dists, double alpha) {
  std::vector<double> out;
  out.reserve(dists.size());
  double dm = 0.0;
  for (double d : dists) {
    dm = alpha * dm + (1.0 - alpha) * d;
    out.push_back(dm);
  }
  return out;
}

std::string scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("abcas_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace abcas::testing
