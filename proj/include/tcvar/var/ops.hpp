#pragma once

// Model layers written once over an arithmetic backend. A backend supplies
//
//   using Value = ...;
//   Precision precision() const;
//   Value cst(const FpNum&);
//   Value add(a, b), sub(a, b), mul(a, b), div(a, b);
//   Value iter_add(const std::vector<Value>&);      single rounding
//   Value exp(a), sqrt(a);
//   Value guarded_div(const Value& g, const Value& a, const Value& b);  a / b, or 0 when g = 0
//   void check_row_sum(const Value&);
//   void begin_layer(const std::string& name, LayerKind);
//   std::vector<Value> end_layer(std::vector<Value> outputs);   may retime the outputs
//
// FpBackend evaluates with the reference arithmetic; the compiler's backend
// emits gadgets. Both walk exactly the same operation sequence.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "tcvar/fp/fp_num.hpp"
#include "tcvar/var/tensor.hpp"

namespace tcvar::var {

using fp::FpNum;
using fp::Precision;

/// Layer categories, each with its own depth bound in the report.
enum class LayerKind { UpInterpolation, Attention, Mlp, LayerNorm, Conv, Lookup, Aggregate, Residual };
const char* to_string(LayerKind k);

struct ConvKernel {
  std::size_t h = 1, w = 1, c = 1;
  std::vector<FpNum> K;  // h x w x c, channel fastest
  FpNum b;

  const FpNum& at(std::size_t i, std::size_t j, std::size_t q) const { return K[(i * w + j) * c + q]; }
};

/// Catmull-Rom cubic (a = -1/2) evaluated in p-bit arithmetic, clamped to [0, 1].
FpNum bicubic_weight(const FpNum& t);

/// Source base index and rounded fractional offset of output coordinate i
/// when resampling `from` -> `to` positions.
struct Tap {
  std::size_t base;
  FpNum frac;
};
Tap source_coordinate(std::size_t i, std::size_t from, std::size_t to, Precision p);

/// The 4 weights W(s - f) for s = -1..2.
std::vector<FpNum> tap_weights(const FpNum& frac);

/// True when every tap row reduces to the unit impulse at s = 0 (identity scaling).
bool is_identity_resample(std::size_t from, std::size_t to, Precision p);

// ---------------------------------------------------------------------------

template <class B>
using ValueOf = typename B::Value;

template <class B>
Mat<ValueOf<B>> const_matrix(B& be, const Mat<FpNum>& m) {
  Mat<ValueOf<B>> out{m.rows, m.cols, {}};
  out.a.reserve(m.a.size());
  for (const auto& x : m.a) out.a.push_back(be.cst(x));
  return out;
}

/// Entry (i, j) = iter_add over k of A[i,k] * B[k,j].
template <class B>
Mat<ValueOf<B>> matmul(B& be, const Mat<ValueOf<B>>& A, const Mat<ValueOf<B>>& Bm) {
  if (A.cols != Bm.rows) throw ShapeMismatch("matmul: inner dimensions differ");
  Mat<ValueOf<B>> out{A.rows, Bm.cols, {}};
  out.a.reserve(A.rows * Bm.cols);
  std::vector<ValueOf<B>> terms;
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t j = 0; j < Bm.cols; ++j) {
      terms.clear();
      for (std::size_t k = 0; k < A.cols; ++k) terms.push_back(be.mul(A.at(i, k), Bm.at(k, j)));
      out.a.push_back(be.iter_add(terms));
    }
  }
  return out;
}

template <class V>
Mat<V> transpose(const Mat<V>& m) {
  Mat<V> out{m.cols, m.rows, {}};
  out.a.reserve(m.a.size());
  for (std::size_t j = 0; j < m.cols; ++j) {
    for (std::size_t i = 0; i < m.rows; ++i) out.a.push_back(m.at(i, j));
  }
  return out;
}

/// Y[i,j,l] = sum over s,t in -1..2 of (W(s - fu) * X[clamp(bu+s), clamp(bv+t), l]) * W(t - fv).
template <class B>
Map<ValueOf<B>> up_interpolate(B& be, const Map<ValueOf<B>>& X, std::size_t h2, std::size_t w2,
                               const std::string& name = "up") {
  if (h2 < X.h || w2 < X.w) throw ShrinkNotSupported("up_interpolate cannot shrink a map");
  const Precision p = be.precision();
  be.begin_layer(name + " " + std::to_string(X.h) + "x" + std::to_string(X.w) + "->" + std::to_string(h2) + "x" +
                     std::to_string(w2),
                 LayerKind::UpInterpolation);
  if (is_identity_resample(X.h, h2, p) && is_identity_resample(X.w, w2, p)) {
    auto Y = X;
    Y.a = be.end_layer(std::move(Y.a));
    return Y;
  }
  auto clampi = [](std::ptrdiff_t v, std::size_t n) {
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(std::max<std::ptrdiff_t>(v, 0), static_cast<std::ptrdiff_t>(n) - 1));
  };
  Map<ValueOf<B>> Y{h2, w2, X.c, {}};
  Y.a.reserve(h2 * w2 * X.c);
  std::vector<ValueOf<B>> terms;
  for (std::size_t i = 0; i < h2; ++i) {
    const Tap tu = source_coordinate(i, X.h, h2, p);
    const auto wu = tap_weights(tu.frac);
    for (std::size_t j = 0; j < w2; ++j) {
      const Tap tv = source_coordinate(j, X.w, w2, p);
      const auto wv = tap_weights(tv.frac);
      for (std::size_t l = 0; l < X.c; ++l) {
        terms.clear();
        for (int s = -1; s <= 2; ++s) {
          const auto r = clampi(static_cast<std::ptrdiff_t>(tu.base) + s, X.h);
          for (int t = -1; t <= 2; ++t) {
            const auto c = clampi(static_cast<std::ptrdiff_t>(tv.base) + t, X.w);
            const auto left = be.mul(be.cst(wu[static_cast<std::size_t>(s + 1)]), X.at(r, c, l));
            terms.push_back(be.mul(left, be.cst(wv[static_cast<std::size_t>(t + 1)])));
          }
        }
        Y.a.push_back(be.iter_add(terms));
      }
    }
  }
  Y.a = be.end_layer(std::move(Y.a));
  return Y;
}

/// A[i,j] = exp(u_i . x_j) with u_i = x_i (W_Q W_K^T).
template <class B>
Mat<ValueOf<B>> attention_matrix(B& be, const Mat<ValueOf<B>>& X, const Mat<FpNum>& Wq, const Mat<FpNum>& Wk) {
  if (Wq.rows != X.cols || Wk.rows != X.cols || Wq.cols != Wk.cols) throw ShapeMismatch("attention weights do not match d");
  const auto M = matmul(be, const_matrix(be, Wq), transpose(const_matrix(be, Wk)));
  const auto U = matmul(be, X, M);
  const auto S = matmul(be, U, transpose(X));
  Mat<ValueOf<B>> A{S.rows, S.cols, {}};
  A.a.reserve(S.a.size());
  for (const auto& s : S.a) A.a.push_back(be.exp(s));
  return A;
}

/// Row i = sum_j (A[i,j] / sum_l A[i,l]) * (X W_V)[j,*]: the row is normalised
/// before it weights the values, so a single token returns x W_V exactly.
template <class B>
Mat<ValueOf<B>> attention_layer(B& be, const Mat<ValueOf<B>>& X, const Mat<FpNum>& Wq, const Mat<FpNum>& Wk,
                                const Mat<FpNum>& Wv, const std::string& name = "attention") {
  if (Wv.rows != X.cols) throw ShapeMismatch("W_V does not match d");
  be.begin_layer(name, LayerKind::Attention);
  const auto A = attention_matrix(be, X, Wq, Wk);
  const auto XV = matmul(be, X, const_matrix(be, Wv));
  Mat<ValueOf<B>> P{A.rows, A.cols, {}};
  P.a.reserve(A.a.size());
  for (std::size_t i = 0; i < A.rows; ++i) {
    const std::vector<ValueOf<B>> row(A.a.begin() + static_cast<std::ptrdiff_t>(i * A.cols),
                                      A.a.begin() + static_cast<std::ptrdiff_t>((i + 1) * A.cols));
    const auto sum = be.iter_add(row);
    be.check_row_sum(sum);
    for (const auto& a : row) P.a.push_back(be.div(a, sum));
  }
  auto out = matmul(be, P, XV);
  out.a = be.end_layer(std::move(out.a));
  return out;
}

/// Row i = W x_i + b, each entry a single-rounding sum including b.
template <class B>
Mat<ValueOf<B>> mlp(B& be, const Mat<ValueOf<B>>& X, const Mat<FpNum>& W, const std::vector<FpNum>& bias,
                    const std::string& name = "mlp") {
  if (W.cols != X.cols || bias.size() != W.rows) throw ShapeMismatch("mlp weights do not match d");
  be.begin_layer(name, LayerKind::Mlp);
  Mat<ValueOf<B>> out{X.rows, W.rows, {}};
  std::vector<ValueOf<B>> terms;
  for (std::size_t i = 0; i < X.rows; ++i) {
    for (std::size_t k = 0; k < W.rows; ++k) {
      terms.clear();
      for (std::size_t l = 0; l < X.cols; ++l) terms.push_back(be.mul(be.cst(W.at(k, l)), X.at(i, l)));
      terms.push_back(be.cst(bias[k]));
      out.a.push_back(be.iter_add(terms));
    }
  }
  out.a = be.end_layer(std::move(out.a));
  return out;
}

/// (x - mu) / sqrt(var) per row; rows with var = 0 give the zero row.
template <class B>
Mat<ValueOf<B>> layer_norm(B& be, const Mat<ValueOf<B>>& X, const std::string& name = "layer_norm") {
  be.begin_layer(name, LayerKind::LayerNorm);
  const Precision p = be.precision();
  const auto d = be.cst(fp::round_rational(static_cast<std::int64_t>(X.cols), 1, p).value);
  Mat<ValueOf<B>> out{X.rows, X.cols, {}};
  for (std::size_t i = 0; i < X.rows; ++i) {
    const std::vector<ValueOf<B>> row(X.a.begin() + static_cast<std::ptrdiff_t>(i * X.cols),
                                      X.a.begin() + static_cast<std::ptrdiff_t>((i + 1) * X.cols));
    const auto mu = be.div(be.iter_add(row), d);
    std::vector<ValueOf<B>> dev, sq;
    for (const auto& x : row) dev.push_back(be.sub(x, mu));
    for (const auto& v : dev) sq.push_back(be.mul(v, v));
    const auto var = be.div(be.iter_add(sq), d);
    const auto sd = be.sqrt(var);
    for (const auto& v : dev) out.a.push_back(be.guarded_div(var, v, sd));
  }
  out.a = be.end_layer(std::move(out.a));
  return out;
}

/// Stride 1, no padding; one output channel per kernel.
template <class B>
Map<ValueOf<B>> conv2d(B& be, const Map<ValueOf<B>>& X, const std::vector<ConvKernel>& kernels,
                       const std::string& name = "conv") {
  for (const auto& k : kernels) {
    if (k.h > X.h || k.w > X.w) throw KernelTooLarge("kernel larger than the feature map");
    if (k.c != X.c) throw ShapeMismatch("kernel channel count differs from the map");
  }
  if (kernels.empty()) throw ShapeMismatch("conv2d needs at least one kernel");
  be.begin_layer(name, LayerKind::Conv);
  const std::size_t oh = X.h - kernels[0].h + 1, ow = X.w - kernels[0].w + 1;
  for (const auto& k : kernels) {
    if (k.h != kernels[0].h || k.w != kernels[0].w) throw ShapeMismatch("kernels of one block differ in size");
  }
  Map<ValueOf<B>> Y{oh, ow, kernels.size(), {}};
  std::vector<ValueOf<B>> terms;
  for (std::size_t i = 0; i < oh; ++i) {
    for (std::size_t j = 0; j < ow; ++j) {
      for (const auto& K : kernels) {
        terms.clear();
        for (std::size_t a = 0; a < K.h; ++a) {
          for (std::size_t bb = 0; bb < K.w; ++bb) {
            for (std::size_t q = 0; q < K.c; ++q) terms.push_back(be.mul(X.at(i + a, j + bb, q), be.cst(K.at(a, bb, q))));
          }
        }
        terms.push_back(be.cst(K.b));
        Y.a.push_back(be.iter_add(terms));
      }
    }
  }
  Y.a = be.end_layer(std::move(Y.a));
  return Y;
}

/// Token features read as weights over the codebook rows: out = x C.
/// A one-hot token row reproduces the plain lookup exactly.
template <class B>
Map<ValueOf<B>> soft_lookup(B& be, const Map<ValueOf<B>>& tokens, const Mat<FpNum>& C,
                            const std::string& name = "codebook") {
  if (tokens.c != C.rows) throw ShapeMismatch("token width differs from the codebook size");
  be.begin_layer(name, LayerKind::Lookup);
  auto out = matmul(be, flatten(tokens), const_matrix(be, C));
  out.a = be.end_layer(std::move(out.a));
  return unflatten(out, tokens.h, tokens.w);
}

/// Entrywise single-rounding sum of equally shaped maps.
template <class B>
Map<ValueOf<B>> sum_maps(B& be, const std::vector<Map<ValueOf<B>>>& maps, const std::string& name) {
  if (maps.empty()) throw EmptyInput("sum_maps of no maps");
  be.begin_layer(name, LayerKind::Aggregate);
  Map<ValueOf<B>> out{maps[0].h, maps[0].w, maps[0].c, {}};
  std::vector<ValueOf<B>> terms;
  for (std::size_t k = 0; k < maps[0].a.size(); ++k) {
    terms.clear();
    for (const auto& m : maps) {
      if (m.h != out.h || m.w != out.w || m.c != out.c) throw ShapeMismatch("summed maps differ in shape");
      terms.push_back(m.a[k]);
    }
    out.a.push_back(be.iter_add(terms));
  }
  out.a = be.end_layer(std::move(out.a));
  return out;
}

}  // namespace tcvar::var
