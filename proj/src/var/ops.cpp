#include "tcvar/var/ops.hpp"

#include "tcvar/fp/ops.hpp"

namespace tcvar::var {

const char* to_string(LayerKind k) {
  switch (k) {
    case LayerKind::UpInterpolation: return "up_interpolation";
    case LayerKind::Attention: return "attention";
    case LayerKind::Mlp: return "mlp";
    case LayerKind::LayerNorm: return "layer_norm";
    case LayerKind::Conv: return "conv";
    case LayerKind::Lookup: return "lookup";
    case LayerKind::Aggregate: return "aggregate";
    case LayerKind::Residual: return "residual";
  }
  return "?";
}

namespace {

FpNum ratio(std::int64_t num, std::int64_t den, Precision p) { return fp::round_rational(num, den, p).value; }

}  // namespace

FpNum bicubic_weight(const FpNum& t) {
  using namespace fp;
  const Precision p = t.precision();
  const FpNum one = FpNum::one(p);
  const FpNum a = t.abs();
  const FpNum a2 = fp_mul(a, a);
  const FpNum a3 = fp_mul(a2, a);
  FpNum w = FpNum::zero(p);
  if (fp_compare(a, one) != Ordering::Greater) {
    // (a+2)|t|^3 - (a+3)|t|^2 + 1
    const std::vector<FpNum> terms{fp_mul(ratio(3, 2, p), a3), fp_mul(ratio(-5, 2, p), a2), one};
    w = fp_iter_add(terms);
  } else if (fp_compare(a, ratio(2, 1, p)) == Ordering::Less) {
    // a(|t|^3 - 5|t|^2 + 8|t| - 4)
    const std::vector<FpNum> terms{a3, fp_mul(ratio(-5, 1, p), a2), fp_mul(ratio(8, 1, p), a), ratio(-4, 1, p)};
    w = fp_mul(ratio(-1, 2, p), fp_iter_add(terms));
  }
  if (w.is_negative()) return FpNum::zero(p);
  if (fp_compare(w, one) == Ordering::Greater) return one;
  return w;
}

Tap source_coordinate(std::size_t i, std::size_t from, std::size_t to, Precision p) {
  const auto num = static_cast<std::int64_t>(i * from);
  const auto den = static_cast<std::int64_t>(to);
  return Tap{static_cast<std::size_t>(num / den), ratio(num % den, den, p)};
}

std::vector<FpNum> tap_weights(const FpNum& frac) {
  const Precision p = frac.precision();
  std::vector<FpNum> w;
  for (int s = -1; s <= 2; ++s) w.push_back(bicubic_weight(fp::fp_sub(ratio(s, 1, p), frac)));
  return w;
}

bool is_identity_resample(std::size_t from, std::size_t to, Precision p) {
  if (from != to) return false;
  const auto w = tap_weights(FpNum::zero(p));
  return w[0].is_zero() && w[1] == FpNum::one(p) && w[2].is_zero() && w[3].is_zero();
}

}  // namespace tcvar::var
