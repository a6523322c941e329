// Copyright 2026 The abcas Authors
// SPDX-License-Identifier: Apache-2.0

#include "abcas/layers.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace abcas::nn {

namespace {

std::string where_prefix(std::string_view where) {
  return where.empty() ? std::string() : std::string(where) + ": ";
}

// Per-sample (C, H, W) view of a per-sample shape; rank-1 becomes (F, 1, 1).
Shape as_chw(const Shape& in, std::string_view where) {
  if (in.size() == 3) return in;
  if (in.size() == 1) return {in[0], 1, 1};
  throw ShapeError(where_prefix(where) + "convolution needs (C, H, W) input, got " +
                   shape_string(in));
}

struct Dims4 {
  std::size_t n, c, h, w;
};

Dims4 batch_chw(const Shape& dims) {
  if (dims.size() == 4) return {dims[0], dims[1], dims[2], dims[3]};
  if (dims.size() == 2) return {dims[0], dims[1], 1, 1};
  throw ShapeError("convolution input must be (N, C, H, W) or (N, F), got " +
                   shape_string(dims));
}

std::size_t parse_size(std::string_view s, std::string_view token) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw std::invalid_argument("bad integer '" + std::string(s) + "' in layer '" +
                                std::string(token) + "'");
  }
  return v;
}

double parse_real(std::string_view s, std::string_view token) {
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
    throw std::invalid_argument("bad number '" + tmp + "' in layer '" + std::string(token) + "'");
  }
  return v;
}

std::vector<std::string_view> split_args(std::string_view args) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = args.find(',');
    auto piece = args.substr(0, comma);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    out.push_back(piece);
    if (comma == std::string_view::npos) break;
    args.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

std::string_view kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::dense: return "dense";
    case LayerKind::conv2d: return "conv";
    case LayerKind::convtranspose2d: return "convt";
    case LayerKind::lrelu: return "lrelu";
    case LayerKind::relu: return "relu";
    case LayerKind::tanh: return "tanh";
    case LayerKind::layernorm: return "layernorm";
    case LayerKind::pixelnorm: return "pixelnorm";
  }
  return "?";
}

std::string format_layer(const LayerSpec& spec) {
  const std::string name(kind_name(spec.kind));
  switch (spec.kind) {
    case LayerKind::dense:
      return name + "(" + std::to_string(spec.out) + ")";
    case LayerKind::conv2d:
    case LayerKind::convtranspose2d:
      return name + "(" + std::to_string(spec.out) + "," + std::to_string(spec.kernel) + "," +
             std::to_string(spec.stride) + "," + std::to_string(spec.padding) + ")";
    case LayerKind::lrelu: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", spec.slope);
      return name + "(" + buf + ")";
    }
    default:
      return name;
  }
}

LayerSpec parse_layer(std::string_view token) {
  std::string_view name = token;
  std::vector<std::string_view> args;
  if (const auto open = token.find('('); open != std::string_view::npos) {
    if (token.back() != ')') {
      throw std::invalid_argument("unbalanced parentheses in layer '" + std::string(token) + "'");
    }
    name = token.substr(0, open);
    args = split_args(token.substr(open + 1, token.size() - open - 2));
  }
  auto want = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw std::invalid_argument("layer '" + std::string(token) + "' takes " +
                                  std::to_string(lo) + (lo == hi ? "" : ".." + std::to_string(hi)) +
                                  " arguments");
    }
  };

  LayerSpec spec;
  if (name == "dense") {
    want(1, 1);
    spec = LayerSpec::dense(parse_size(args[0], token));
  } else if (name == "conv" || name == "convt") {
    want(4, 4);
    const auto out = parse_size(args[0], token);
    const auto k = parse_size(args[1], token);
    const auto s = parse_size(args[2], token);
    const auto p = parse_size(args[3], token);
    spec = name == "conv" ? LayerSpec::conv(out, k, s, p) : LayerSpec::convt(out, k, s, p);
    if (k == 0) throw std::invalid_argument("kernel must be positive");
    if (s != 1 && s != 2) throw std::invalid_argument("stride must be 1 or 2 in '" + std::string(token) + "'");
  } else if (name == "lrelu") {
    want(0, 1);
    spec = LayerSpec::lrelu(args.empty() ? 0.2 : parse_real(args[0], token));
    if (!(spec.slope > 0.0 && spec.slope < 1.0)) {
      throw std::invalid_argument("lrelu slope must lie in (0, 1)");
    }
  } else if (name == "relu" || name == "tanh" || name == "layernorm" || name == "pixelnorm") {
    want(0, 0);
    spec.kind = name == "relu"        ? LayerKind::relu
                : name == "tanh"      ? LayerKind::tanh
                : name == "layernorm" ? LayerKind::layernorm
                                      : LayerKind::pixelnorm;
  } else {
    throw std::invalid_argument(
        "unknown layer '" + std::string(name) +
        "' (expected dense, conv, convt, lrelu, relu, tanh, layernorm, pixelnorm)");
  }
  if (spec.is_linear() && spec.out == 0) {
    throw std::invalid_argument("layer '" + std::string(token) + "' needs a positive width");
  }
  return spec;
}

std::vector<LayerSpec> parse_layers(std::string_view text) {
  std::vector<LayerSpec> out;
  std::string token;
  int depth = 0;
  auto flush = [&] {
    if (!token.empty()) out.push_back(parse_layer(token));
    token.clear();
  };
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (depth == 0 && (ch == ' ' || ch == '\t' || ch == ';' || ch == '\n')) {
      flush();
    } else if (ch != ' ' && ch != '\t') {
      token += ch;
    }
  }
  flush();
  return out;
}

std::string format_layers(const std::vector<LayerSpec>& layers) {
  std::string s;
  for (const auto& l : layers) {
    if (!s.empty()) s += ' ';
    s += format_layer(l);
  }
  return s;
}

Shape infer_output_shape(const LayerSpec& spec, const Shape& in, std::string_view where) {
  if (in.empty() || shape_size(in) == 0) {
    throw ShapeError(where_prefix(where) + "empty input shape");
  }
  switch (spec.kind) {
    case LayerKind::dense:
      return {spec.out};
    case LayerKind::conv2d: {
      const auto chw = as_chw(in, where);
      auto extent = [&](std::size_t n) {
        const std::size_t padded = n + 2 * spec.padding;
        if (padded < spec.kernel || (padded - spec.kernel) % spec.stride != 0) {
          throw ShapeError(where_prefix(where) + format_layer(spec) +
                           " does not tile input " + shape_string(in));
        }
        return (padded - spec.kernel) / spec.stride + 1;
      };
      return {spec.out, extent(chw[1]), extent(chw[2])};
    }
    case LayerKind::convtranspose2d: {
      const auto chw = as_chw(in, where);
      auto extent = [&](std::size_t n) {
        const std::size_t full = (n - 1) * spec.stride + spec.kernel;
        if (full <= 2 * spec.padding) {
          throw ShapeError(where_prefix(where) + format_layer(spec) +
                           " produces an empty output for " + shape_string(in));
        }
        return full - 2 * spec.padding;
      };
      return {spec.out, extent(chw[1]), extent(chw[2])};
    }
    case LayerKind::pixelnorm:
      if (in.size() != 1 && in.size() != 3) {
        throw ShapeError(where_prefix(where) + "pixelnorm needs (F) or (C, H, W), got " +
                         shape_string(in));
      }
      return in;
    default:
      return in;
  }
}

Shape weight_shape(const LayerSpec& spec, const Shape& in) {
  switch (spec.kind) {
    case LayerKind::dense:
      return {spec.out, shape_size(in)};
    case LayerKind::conv2d:
      return {spec.out, as_chw(in, {})[0], spec.kernel, spec.kernel};
    case LayerKind::convtranspose2d:
      return {as_chw(in, {})[0], spec.out, spec.kernel, spec.kernel};
    case LayerKind::layernorm:
      return {shape_size(in)};
    default:
      return {};
  }
}

Shape bias_shape(const LayerSpec& spec, const Shape& in) {
  switch (spec.kind) {
    case LayerKind::dense:
    case LayerKind::conv2d:
    case LayerKind::convtranspose2d:
      return {spec.out};
    case LayerKind::layernorm:
      return {shape_size(in)};
    default:
      return {};
  }
}

// --- dense -----------------------------------------------------------------

template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& x, const BasicTensor<T>& W,
                             const BasicTensor<T>& b) {
  const std::size_t n = x.dim(0);
  const std::size_t in = x.stride0();
  const std::size_t out = W.rows();
  if (W.cols() != in || b.size() != out) {
    throw ShapeError("dense: input features " + std::to_string(in) + " vs weight " +
                     shape_string(W.dims()));
  }
  BasicTensor<T> y({n, out});
  for (std::size_t s = 0; s < n; ++s) {
    const T* xs = x.data().data() + s * in;
    for (std::size_t o = 0; o < out; ++o) {
      const T* w = &W.at(o, 0);
      T acc = b[o];
      for (std::size_t i = 0; i < in; ++i) acc += w[i] * xs[i];
      y.at(s, o) = acc;
    }
  }
  return y;
}

template <typename T>
void dense_backward(const BasicTensor<T>& x, const BasicTensor<T>& W, const BasicTensor<T>& dy,
                    BasicTensor<T>* dW, BasicTensor<T>* db, BasicTensor<T>* dx) {
  const std::size_t n = x.dim(0);
  const std::size_t in = x.stride0();
  const std::size_t out = W.rows();
  if (dx) *dx = BasicTensor<T>(x.dims());
  for (std::size_t s = 0; s < n; ++s) {
    const T* xs = x.data().data() + s * in;
    for (std::size_t o = 0; o < out; ++o) {
      const T g = dy.at(s, o);
      if (db) (*db)[o] += g;
      if (dW) {
        T* dw = &dW->at(o, 0);
        for (std::size_t i = 0; i < in; ++i) dw[i] += g * xs[i];
      }
      if (dx) {
        const T* w = &W.at(o, 0);
        T* dxs = dx->data().data() + s * in;
        for (std::size_t i = 0; i < in; ++i) dxs[i] += g * w[i];
      }
    }
  }
}

// --- conv2d ----------------------------------------------------------------

template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& x, const BasicTensor<T>& W,
                              const BasicTensor<T>& b, std::size_t stride, std::size_t pad) {
  const auto d = batch_chw(x.dims());
  const std::size_t co_n = W.dim(0), k = W.dim(2);
  if (W.dim(1) != d.c) throw ShapeError("conv2d: channel mismatch");
  const LayerSpec spec = LayerSpec::conv(co_n, k, stride, pad);
  const auto os = infer_output_shape(spec, {d.c, d.h, d.w});
  const std::size_t oh = os[1], ow = os[2];
  const long p = static_cast<long>(pad);

  BasicTensor<T> y({d.n, co_n, oh, ow});
  const T* xd = x.data().data();
  const T* wd = W.data().data();
  T* yd = y.data().data();
  for (std::size_t n = 0; n < d.n; ++n) {
    for (std::size_t co = 0; co < co_n; ++co) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
          T acc = b[co];
          for (std::size_t ci = 0; ci < d.c; ++ci) {
            const T* xc = xd + (n * d.c + ci) * d.h * d.w;
            const T* wk = wd + (co * d.c + ci) * k * k;
            for (std::size_t ky = 0; ky < k; ++ky) {
              const long iy = static_cast<long>(oy * stride + ky) - p;
              if (iy < 0 || iy >= static_cast<long>(d.h)) continue;
              for (std::size_t kx = 0; kx < k; ++kx) {
                const long ix = static_cast<long>(ox * stride + kx) - p;
                if (ix < 0 || ix >= static_cast<long>(d.w)) continue;
                acc += wk[ky * k + kx] * xc[iy * d.w + ix];
              }
            }
          }
          yd[((n * co_n + co) * oh + oy) * ow + ox] = acc;
        }
      }
    }
  }
  return y;
}

template <typename T>
void conv2d_backward(const BasicTensor<T>& x, const BasicTensor<T>& W, const BasicTensor<T>& dy,
                     std::size_t stride, std::size_t pad, BasicTensor<T>* dW, BasicTensor<T>* db,
                     BasicTensor<T>* dx) {
  const auto d = batch_chw(x.dims());
  const std::size_t co_n = W.dim(0), k = W.dim(2);
  const std::size_t oh = dy.dim(2), ow = dy.dim(3);
  const long p = static_cast<long>(pad);
  if (dx) *dx = BasicTensor<T>(x.dims());

  const T* xd = x.data().data();
  const T* wd = W.data().data();
  const T* gd = dy.data().data();
  for (std::size_t n = 0; n < d.n; ++n) {
    for (std::size_t co = 0; co < co_n; ++co) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const T g = gd[((n * co_n + co) * oh + oy) * ow + ox];
          if (db) (*db)[co] += g;
          for (std::size_t ci = 0; ci < d.c; ++ci) {
            const std::size_t xoff = (n * d.c + ci) * d.h * d.w;
            const std::size_t woff = (co * d.c + ci) * k * k;
            for (std::size_t ky = 0; ky < k; ++ky) {
              const long iy = static_cast<long>(oy * stride + ky) - p;
              if (iy < 0 || iy >= static_cast<long>(d.h)) continue;
              for (std::size_t kx = 0; kx < k; ++kx) {
                const long ix = static_cast<long>(ox * stride + kx) - p;
                if (ix < 0 || ix >= static_cast<long>(d.w)) continue;
                const std::size_t xi = xoff + iy * d.w + ix;
                const std::size_t wi = woff + ky * k + kx;
                if (dW) (*dW)[wi] += g * xd[xi];
                if (dx) (*dx)[xi] += g * wd[wi];
              }
            }
          }
        }
      }
    }
  }
}

// --- transposed conv ---------------------------------------------------------

template <typename T>
BasicTensor<T> conv_transpose2d_forward(const BasicTensor<T>& x, const BasicTensor<T>& W,
                                        const BasicTensor<T>& b, std::size_t stride,
                                        std::size_t pad) {
  const auto d = batch_chw(x.dims());
  if (W.dim(0) != d.c) throw ShapeError("convtranspose2d: channel mismatch");
  const std::size_t co_n = W.dim(1), k = W.dim(2);
  const auto os = infer_output_shape(LayerSpec::convt(co_n, k, stride, pad), {d.c, d.h, d.w});
  const std::size_t oh = os[1], ow = os[2];
  const long p = static_cast<long>(pad);

  BasicTensor<T> y({d.n, co_n, oh, ow});
  T* yd = y.data().data();
  for (std::size_t n = 0; n < d.n; ++n)
    for (std::size_t co = 0; co < co_n; ++co)
      for (std::size_t i = 0; i < oh * ow; ++i) yd[(n * co_n + co) * oh * ow + i] = b[co];

  const T* xd = x.data().data();
  const T* wd = W.data().data();
  for (std::size_t n = 0; n < d.n; ++n) {
    for (std::size_t ci = 0; ci < d.c; ++ci) {
      for (std::size_t iy = 0; iy < d.h; ++iy) {
        for (std::size_t ix = 0; ix < d.w; ++ix) {
          const T xv = xd[((n * d.c + ci) * d.h + iy) * d.w + ix];
          for (std::size_t co = 0; co < co_n; ++co) {
            const T* wk = wd + (ci * co_n + co) * k * k;
            T* yc = yd + (n * co_n + co) * oh * ow;
            for (std::size_t ky = 0; ky < k; ++ky) {
              const long oy = static_cast<long>(iy * stride + ky) - p;
              if (oy < 0 || oy >= static_cast<long>(oh)) continue;
              for (std::size_t kx = 0; kx < k; ++kx) {
                const long ox = static_cast<long>(ix * stride + kx) - p;
                if (ox < 0 || ox >= static_cast<long>(ow)) continue;
                yc[oy * ow + ox] += wk[ky * k + kx] * xv;
              }
            }
          }
        }
      }
    }
  }
  return y;
}

template <typename T>
void conv_transpose2d_backward(const BasicTensor<T>& x, const BasicTensor<T>& W,
                               const BasicTensor<T>& dy, std::size_t stride, std::size_t pad,
                               BasicTensor<T>* dW, BasicTensor<T>* db, BasicTensor<T>* dx) {
  const auto d = batch_chw(x.dims());
  const std::size_t co_n = W.dim(1), k = W.dim(2);
  const std::size_t oh = dy.dim(2), ow = dy.dim(3);
  const long p = static_cast<long>(pad);
  if (dx) *dx = BasicTensor<T>(x.dims());

  const T* gd = dy.data().data();
  if (db) {
    for (std::size_t n = 0; n < d.n; ++n)
      for (std::size_t co = 0; co < co_n; ++co)
        for (std::size_t i = 0; i < oh * ow; ++i) (*db)[co] += gd[(n * co_n + co) * oh * ow + i];
  }

  const T* xd = x.data().data();
  const T* wd = W.data().data();
  for (std::size_t n = 0; n < d.n; ++n) {
    for (std::size_t ci = 0; ci < d.c; ++ci) {
      for (std::size_t iy = 0; iy < d.h; ++iy) {
        for (std::size_t ix = 0; ix < d.w; ++ix) {
          const std::size_t xi = ((n * d.c + ci) * d.h + iy) * d.w + ix;
          const T xv = xd[xi];
          T acc{0};
          for (std::size_t co = 0; co < co_n; ++co) {
            const std::size_t woff = (ci * co_n + co) * k * k;
            const T* gc = gd + (n * co_n + co) * oh * ow;
            for (std::size_t ky = 0; ky < k; ++ky) {
              const long oy = static_cast<long>(iy * stride + ky) - p;
              if (oy < 0 || oy >= static_cast<long>(oh)) continue;
              for (std::size_t kx = 0; kx < k; ++kx) {
                const long ox = static_cast<long>(ix * stride + kx) - p;
                if (ox < 0 || ox >= static_cast<long>(ow)) continue;
                const T g = gc[oy * ow + ox];
                if (dW) (*dW)[woff + ky * k + kx] += g * xv;
                acc += g * wd[woff + ky * k + kx];
              }
            }
          }
          if (dx) (*dx)[xi] = acc;
        }
      }
    }
  }
}

// --- pointwise ----------------------------------------------------------------

template <typename T>
BasicTensor<T> lrelu_forward(const BasicTensor<T>& x, double slope) {
  BasicTensor<T> y = x;
  const T a = static_cast<T>(slope);
  for (auto& v : y.data()) v = v < T{0} ? a * v : v;
  return y;
}

template <typename T>
BasicTensor<T> lrelu_backward(const BasicTensor<T>& x, const BasicTensor<T>& dy, double slope) {
  BasicTensor<T> dx = dy;
  const T a = static_cast<T>(slope);
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > T{0} ? dy[i] : a * dy[i];
  return dx;
}

template <typename T>
BasicTensor<T> relu_forward(const BasicTensor<T>& x) {
  BasicTensor<T> y = x;
  for (auto& v : y.data()) v = v < T{0} ? T{0} : v;
  return y;
}

template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& x, const BasicTensor<T>& dy) {
  BasicTensor<T> dx = dy;
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > T{0} ? dy[i] : T{0};
  return dx;
}

template <typename T>
BasicTensor<T> tanh_forward(const BasicTensor<T>& x) {
  BasicTensor<T> y = x;
  for (auto& v : y.data()) v = std::tanh(v);
  return y;
}

template <typename T>
BasicTensor<T> tanh_backward(const BasicTensor<T>& y, const BasicTensor<T>& dy) {
  BasicTensor<T> dx = dy;
  for (std::size_t i = 0; i < y.size(); ++i) dx[i] = dy[i] * (T{1} - y[i] * y[i]);
  return dx;
}

// --- normalization -------------------------------------------------------------

template <typename T>
BasicTensor<T> layernorm_forward(const BasicTensor<T>& x, const BasicTensor<T>& gain,
                                 const BasicTensor<T>& bias, std::vector<T>* stats) {
  const std::size_t n = x.dim(0);
  const std::size_t f = x.stride0();
  if (gain.size() != f || bias.size() != f) {
    throw ShapeError("layernorm: affine size " + std::to_string(gain.size()) +
                     " vs features " + std::to_string(f));
  }
  if (stats) stats->assign(2 * n, T{0});
  BasicTensor<T> y(x.dims());
  for (std::size_t s = 0; s < n; ++s) {
    const T* xs = x.data().data() + s * f;
    double mean = 0.0;
    for (std::size_t i = 0; i < f; ++i) mean += xs[i];
    mean /= static_cast<double>(f);
    double var = 0.0;
    for (std::size_t i = 0; i < f; ++i) var += (xs[i] - mean) * (xs[i] - mean);
    var /= static_cast<double>(f);
    const double rstd = 1.0 / std::sqrt(var + kLayerNormEps);
    T* ys = y.data().data() + s * f;
    for (std::size_t i = 0; i < f; ++i) {
      ys[i] = static_cast<T>(gain[i] * ((xs[i] - mean) * rstd) + bias[i]);
    }
    if (stats) {
      (*stats)[2 * s] = static_cast<T>(mean);
      (*stats)[2 * s + 1] = static_cast<T>(rstd);
    }
  }
  return y;
}

template <typename T>
void layernorm_backward(const BasicTensor<T>& x, const BasicTensor<T>& gain,
                        const std::vector<T>& stats, const BasicTensor<T>& dy,
                        BasicTensor<T>* dgain, BasicTensor<T>* dbias, BasicTensor<T>* dx) {
  const std::size_t n = x.dim(0);
  const std::size_t f = x.stride0();
  if (dx) *dx = BasicTensor<T>(x.dims());
  std::vector<double> xhat(f), dxhat(f);
  for (std::size_t s = 0; s < n; ++s) {
    const T* xs = x.data().data() + s * f;
    const T* gs = dy.data().data() + s * f;
    const double mean = stats[2 * s];
    const double rstd = stats[2 * s + 1];
    double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
    for (std::size_t i = 0; i < f; ++i) {
      xhat[i] = (xs[i] - mean) * rstd;
      dxhat[i] = static_cast<double>(gs[i]) * gain[i];
      sum_dxhat += dxhat[i];
      sum_dxhat_xhat += dxhat[i] * xhat[i];
      if (dgain) (*dgain)[i] += static_cast<T>(gs[i] * xhat[i]);
      if (dbias) (*dbias)[i] += gs[i];
    }
    if (dx) {
      const double inv_f = 1.0 / static_cast<double>(f);
      T* dxs = dx->data().data() + s * f;
      for (std::size_t i = 0; i < f; ++i) {
        dxs[i] = static_cast<T>(
            rstd * (dxhat[i] - sum_dxhat * inv_f - xhat[i] * sum_dxhat_xhat * inv_f));
      }
    }
  }
}

template <typename T>
BasicTensor<T> pixelnorm_forward(const BasicTensor<T>& x, std::vector<T>* scales) {
  if (x.rank() < 2) throw ShapeError("pixelnorm needs a batched input");
  const std::size_t n = x.dim(0);
  const std::size_t c = x.dim(1);
  const std::size_t sp = x.stride0() / c;
  if (scales) scales->assign(n * sp, T{0});
  BasicTensor<T> y(x.dims());
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t base = s * c * sp;
    for (std::size_t q = 0; q < sp; ++q) {
      double ms = 0.0;
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double a = x[base + ch * sp + q];
        ms += a * a;
      }
      ms /= static_cast<double>(c);
      const double scale = 1.0 / std::sqrt(ms + kPixelNormEps);
      for (std::size_t ch = 0; ch < c; ++ch) {
        y[base + ch * sp + q] = static_cast<T>(x[base + ch * sp + q] * scale);
      }
      if (scales) (*scales)[s * sp + q] = static_cast<T>(scale);
    }
  }
  return y;
}

template <typename T>
BasicTensor<T> pixelnorm_backward(const BasicTensor<T>& x, const std::vector<T>& scales,
                                  const BasicTensor<T>& dy) {
  const std::size_t n = x.dim(0);
  const std::size_t c = x.dim(1);
  const std::size_t sp = x.stride0() / c;
  BasicTensor<T> dx(x.dims());
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t base = s * c * sp;
    for (std::size_t q = 0; q < sp; ++q) {
      const double scale = scales[s * sp + q];
      double ga = 0.0;
      for (std::size_t ch = 0; ch < c; ++ch) {
        ga += static_cast<double>(dy[base + ch * sp + q]) * x[base + ch * sp + q];
      }
      const double k = scale * scale * scale * ga / static_cast<double>(c);
      for (std::size_t ch = 0; ch < c; ++ch) {
        const std::size_t i = base + ch * sp + q;
        dx[i] = static_cast<T>(scale * dy[i] - x[i] * k);
      }
    }
  }
  return dx;
}

#define ABCAS_INSTANTIATE(T)                                                                   \
  template BasicTensor<T> dense_forward(const BasicTensor<T>&, const BasicTensor<T>&,            \
                                        const BasicTensor<T>&);                                  \
  template void dense_backward(const BasicTensor<T>&, const BasicTensor<T>&,                     \
                               const BasicTensor<T>&, BasicTensor<T>*, BasicTensor<T>*,          \
                               BasicTensor<T>*);                                                 \
  template BasicTensor<T> conv2d_forward(const BasicTensor<T>&, const BasicTensor<T>&,           \
                                         const BasicTensor<T>&, std::size_t, std::size_t);       \
  template void conv2d_backward(const BasicTensor<T>&, const BasicTensor<T>&,                    \
                                const BasicTensor<T>&, std::size_t, std::size_t,                 \
                                BasicTensor<T>*, BasicTensor<T>*, BasicTensor<T>*);              \
  template BasicTensor<T> conv_transpose2d_forward(const BasicTensor<T>&, const BasicTensor<T>&, \
                                                   const BasicTensor<T>&, std::size_t,           \
                                                   std::size_t);                                 \
  template void conv_transpose2d_backward(const BasicTensor<T>&, const BasicTensor<T>&,          \
                                          const BasicTensor<T>&, std::size_t, std::size_t,       \
                                          BasicTensor<T>*, BasicTensor<T>*, BasicTensor<T>*);    \
  template BasicTensor<T> lrelu_forward(const BasicTensor<T>&, double);                          \
  template BasicTensor<T> lrelu_backward(const BasicTensor<T>&, const BasicTensor<T>&, double);  \
  template BasicTensor<T> relu_forward(const BasicTensor<T>&);                                   \
  template BasicTensor<T> relu_backward(const BasicTensor<T>&, const BasicTensor<T>&);           \
  template BasicTensor<T> tanh_forward(const BasicTensor<T>&);                                   \
  template BasicTensor<T> tanh_backward(const BasicTensor<T>&, const BasicTensor<T>&);           \
  template BasicTensor<T> layernorm_forward(const BasicTensor<T>&, const BasicTensor<T>&,        \
                                            const BasicTensor<T>&, std::vector<T>*);             \
  template void layernorm_backward(const BasicTensor<T>&, const BasicTensor<T>&,                 \
                                   const std::vector<T>&, const BasicTensor<T>&,                 \
                                   BasicTensor<T>*, BasicTensor<T>*, BasicTensor<T>*);           \
  template BasicTensor<T> pixelnorm_forward(const BasicTensor<T>&, std::vector<T>*);             \
  template BasicTensor<T> pixelnorm_backward(const BasicTensor<T>&, const std::vector<T>&,       \
                                             const BasicTensor<T>&);

ABCAS_INSTANTIATE(float)
ABCAS_INSTANTIATE(double)
#undef ABCAS_INSTANTIATE

}  // namespace abcas::nn
