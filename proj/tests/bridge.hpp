#pragma once
// Random values and conversions between model tensors and the brute-force grids.

#include <random>

#include "brute.hpp"
#include "tcvar/var/ops.hpp"

namespace bridge {

using tcvar::fp::FpNum;
using tcvar::fp::Precision;
using tcvar::var::ConvKernel;
using tcvar::var::Map;
using tcvar::var::Mat;

struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t s) : g(s) {}
  FpNum val(Precision p, double lo = -1.0, double hi = 1.0) {
    return tcvar::fp::from_double(std::uniform_real_distribution<double>(lo, hi)(g), p);
  }
  Mat<FpNum> mat(std::size_t r, std::size_t c, Precision p) {
    Mat<FpNum> m{r, c, {}};
    for (std::size_t k = 0; k < r * c; ++k) m.a.push_back(val(p));
    return m;
  }
  Map<FpNum> map(std::size_t h, std::size_t w, std::size_t c, Precision p) {
    Map<FpNum> m{h, w, c, {}};
    for (std::size_t k = 0; k < h * w * c; ++k) m.a.push_back(val(p));
    return m;
  }
  ConvKernel kernel(std::size_t h, std::size_t w, std::size_t c, Precision p) {
    ConvKernel k{h, w, c, {}, val(p)};
    for (std::size_t i = 0; i < h * w * c; ++i) k.K.push_back(val(p));
    return k;
  }
};

inline brute::Grid2 g2(const Mat<FpNum>& m) {
  brute::Grid2 out(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) out[i].push_back(m.at(i, j));
  }
  return out;
}

inline brute::Grid3 g3(const Map<FpNum>& m) {
  brute::Grid3 out(m.h, std::vector<brute::Vec>(m.w));
  for (std::size_t i = 0; i < m.h; ++i) {
    for (std::size_t j = 0; j < m.w; ++j) {
      for (std::size_t l = 0; l < m.c; ++l) out[i][j].push_back(m.at(i, j, l));
    }
  }
  return out;
}

inline brute::Kernel bk(const ConvKernel& k) {
  brute::Kernel out{brute::Grid3(k.h, std::vector<brute::Vec>(k.w)), k.b};
  for (std::size_t a = 0; a < k.h; ++a) {
    for (std::size_t b = 0; b < k.w; ++b) {
      for (std::size_t q = 0; q < k.c; ++q) out.K[a][b].push_back(k.at(a, b, q));
    }
  }
  return out;
}

inline std::vector<brute::Kernel> bks(const std::vector<ConvKernel>& ks) {
  std::vector<brute::Kernel> out;
  for (const auto& k : ks) out.push_back(bk(k));
  return out;
}

}  // namespace bridge
