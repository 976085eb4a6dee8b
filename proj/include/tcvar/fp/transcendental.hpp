#pragma once

#include <vector>

#include "tcvar/fp/fp_num.hpp"

namespace tcvar::fp {

/// Fixed-point parameters of the exponential. The circuit gadget mirrors the
/// same integer algorithm, so both sides read them from here.
///
///   X   = floor(|x| * 2^F)
///   k   = (X * inv_ln2 + 2^(F+G-1)) >> (F+G)
///   R   = floor((X * 2^guard - k * ln2) / 2^guard)      (sign of x applied)
///   acc = 2^F; for j = degree..1: acc = 2^F + floor(floor(acc*R/2^F) * recip[j]/2^F)
///   exp(x) ~ round_p(acc * 2^(k - F))
struct ExpParams {
  int p = 0;
  int frac_bits = 0;      // F
  int inv_ln2_bits = 0;   // G
  int guard_bits = 0;     // extra bits of ln2 below F
  int degree = 0;         // Taylor degree
  BigInt inv_ln2;         // round(2^G / ln 2)
  BigInt ln2;             // round(ln 2 * 2^(F + guard))
  std::vector<BigInt> recip;  // recip[j] = round(2^F / j), index 0 unused

  static ExpParams for_precision(Precision p);
};

/// Fixed-point parameters of the square root (Newton on 1/sqrt).
///
///   y = significand scaled into [1, 4) with F fractional bits
///   z = seeds[floor(2y) - 2]
///   repeat iterations: z = (z * (3*2^F - ((y * ((z*z) >> F)) >> F))) >> (F+1)
///   sqrt ~ round_p(((y * z) >> F) * 2^(half_exponent - F))
struct SqrtParams {
  int p = 0;
  int frac_bits = 0;
  int iterations = 0;
  std::vector<BigInt> seeds;  // six entries, one per half-unit interval of y

  static SqrtParams for_precision(Precision p);
};

/// exp(x) within relative error 2^-p; the event flags saturation or flush.
Rounded fp_exp(const FpNum& x);

/// sqrt(x) within relative error 2^-p; throws DomainError when x < 0.
FpNum fp_sqrt(const FpNum& x);

}  // namespace tcvar::fp
