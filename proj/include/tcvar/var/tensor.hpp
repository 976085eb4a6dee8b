#pragma once

#include <cstddef>
#include <vector>

#include "tcvar/error.hpp"

namespace tcvar::var {

/// Row-major rows x cols matrix. V need not be default-constructible.
template <class V>
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<V> a;

  V& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const V& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Mat filled(std::size_t r, std::size_t c, const V& v) { return Mat{r, c, std::vector<V>(r * c, v)}; }
};

/// h x w x c feature map, channel fastest.
template <class V>
struct Map {
  std::size_t h = 0, w = 0, c = 0;
  std::vector<V> a;

  V& at(std::size_t i, std::size_t j, std::size_t l) { return a[(i * w + j) * c + l]; }
  const V& at(std::size_t i, std::size_t j, std::size_t l) const { return a[(i * w + j) * c + l]; }
  std::size_t positions() const { return h * w; }
};

/// Token maps of one sequence; n = sum of h*w.
template <class V>
using TokenSequence = std::vector<Map<V>>;

/// Flattens positions row-major into an n x c matrix.
template <class V>
Mat<V> flatten(const Map<V>& m) {
  return Mat<V>{m.h * m.w, m.c, m.a};
}

template <class V>
Map<V> unflatten(const Mat<V>& x, std::size_t h, std::size_t w) {
  if (x.rows != h * w) throw ShapeMismatch("unflatten: row count does not match h*w");
  return Map<V>{h, w, x.cols, x.a};
}

/// Concatenates the token maps of a sequence into one n x d matrix.
template <class V>
Mat<V> stack(const TokenSequence<V>& seq) {
  Mat<V> out{0, seq.empty() ? 0 : seq.front().c, {}};
  for (const auto& m : seq) {
    if (m.c != out.cols) throw ShapeMismatch("token maps differ in channel count");
    out.rows += m.positions();
    out.a.insert(out.a.end(), m.a.begin(), m.a.end());
  }
  return out;
}

/// Splits an n x d matrix back into maps with the shapes of `like`.
template <class V, class W>
TokenSequence<V> unstack(const Mat<V>& x, const TokenSequence<W>& like) {
  TokenSequence<V> out;
  std::size_t row = 0;
  for (const auto& m : like) {
    Map<V> t{m.h, m.w, x.cols, {}};
    const auto first = x.a.begin() + static_cast<std::ptrdiff_t>(row * x.cols);
    t.a.assign(first, first + static_cast<std::ptrdiff_t>(m.positions() * x.cols));
    row += m.positions();
    out.push_back(std::move(t));
  }
  if (row != x.rows) throw ShapeMismatch("unstack: row count does not match the token maps");
  return out;
}

}  // namespace tcvar::var
