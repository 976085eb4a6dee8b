#include "tcvar/fp/transcendental.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "tcvar/error.hpp"

namespace tcvar::fp {

namespace {

using Real = boost::multiprecision::cpp_bin_float_50;

BigInt round_real(const Real& v) {
  return static_cast<BigInt>(boost::multiprecision::round(v));
}

// floor(v / 2^s) for signed v; cpp_int shifts truncate toward zero.
BigInt floor_shift(const BigInt& v, unsigned s) {
  if (v >= 0) return v >> s;
  const BigInt mag = -v;
  BigInt q = mag >> s;
  if ((q << s) != mag) q += 1;
  return -q;
}

int ceil_log2(int n) {
  int r = 0;
  while ((1 << r) < n) ++r;
  return r;
}

}  // namespace

ExpParams ExpParams::for_precision(Precision p) {
  ExpParams ep;
  ep.p = p.bits();
  ep.frac_bits = 2 * ep.p + 8;
  ep.inv_ln2_bits = ep.p + 4;
  ep.guard_bits = ep.p + 4;
  ep.degree = ep.p + 2;
  const Real ln2 = boost::multiprecision::log(Real(2));
  ep.inv_ln2 = round_real(boost::multiprecision::ldexp(Real(1), ep.inv_ln2_bits) / ln2);
  ep.ln2 = round_real(boost::multiprecision::ldexp(ln2, ep.frac_bits + ep.guard_bits));
  ep.recip.assign(static_cast<std::size_t>(ep.degree) + 1, BigInt(0));
  for (int j = 1; j <= ep.degree; ++j) {
    ep.recip[static_cast<std::size_t>(j)] =
        round_real(boost::multiprecision::ldexp(Real(1), ep.frac_bits) / Real(j));
  }
  return ep;
}

SqrtParams SqrtParams::for_precision(Precision p) {
  SqrtParams sp;
  sp.p = p.bits();
  sp.frac_bits = 2 * sp.p + 8;
  sp.iterations = ceil_log2(sp.p) + 2;
  for (int idx = 0; idx < 6; ++idx) {
    const Real lo = Real(idx + 2) / 2;
    const Real hi = lo + Real(1) / 2;
    const Real mid = (1 / boost::multiprecision::sqrt(lo) + 1 / boost::multiprecision::sqrt(hi)) / 2;
    sp.seeds.push_back(round_real(boost::multiprecision::ldexp(mid, sp.frac_bits)));
  }
  return sp;
}

Rounded fp_exp(const FpNum& x) {
  const Precision prec = x.precision();
  if (x.is_zero()) return {FpNum::one(prec), RangeEvent::None};
  // |x| >= 2^(p+1) is beyond the representable range either way.
  if (x.e() >= 2) {
    if (x.is_negative()) return {FpNum::zero(prec), RangeEvent::Underflow};
    return {FpNum::max_magnitude(prec), RangeEvent::Overflow};
  }
  const ExpParams ep = ExpParams::for_precision(prec);
  const int F = ep.frac_bits;
  const BigInt mag = x.abs().m();
  const std::int64_t shift = x.e() + F;
  const BigInt X = shift >= 0 ? BigInt(mag << static_cast<unsigned>(shift))
                              : BigInt(mag >> static_cast<unsigned>(-shift));

  const unsigned kg = static_cast<unsigned>(F + ep.inv_ln2_bits);
  BigInt k = (X * ep.inv_ln2 + (BigInt(1) << (kg - 1))) >> kg;
  BigInt r = floor_shift((X << static_cast<unsigned>(ep.guard_bits)) - k * ep.ln2,
                         static_cast<unsigned>(ep.guard_bits));
  if (x.is_negative()) {
    r = -r;
    k = -k;
  }

  const BigInt one = BigInt(1) << static_cast<unsigned>(F);
  BigInt acc = one;
  for (int j = ep.degree; j >= 1; --j) {
    const BigInt t = floor_shift(acc * r, static_cast<unsigned>(F));
    acc = one + floor_shift(t * ep.recip[static_cast<std::size_t>(j)], static_cast<unsigned>(F));
  }
  return round_p(acc, static_cast<std::int64_t>(k) - F, prec);
}

FpNum fp_sqrt(const FpNum& x) {
  const Precision prec = x.precision();
  if (x.is_negative()) throw DomainError("fp_sqrt of a negative value");
  if (x.is_zero()) return x;
  const SqrtParams sp = SqrtParams::for_precision(prec);
  const int F = sp.frac_bits;
  const int p = sp.p;

  BigInt m = x.m();
  std::int64_t e = x.e();
  if (((e + p - 1) % 2 + 2) % 2 != 0) {
    m <<= 1;
    e -= 1;
  }
  const BigInt y = m << static_cast<unsigned>(F - (p - 1));
  const auto idx = static_cast<std::size_t>(static_cast<int>(y >> static_cast<unsigned>(F - 1)) - 2);
  BigInt z = sp.seeds[idx];
  const BigInt three = BigInt(3) << static_cast<unsigned>(F);
  for (int i = 0; i < sp.iterations; ++i) {
    const BigInt t = (z * z) >> static_cast<unsigned>(F);
    const BigInt u = (y * t) >> static_cast<unsigned>(F);
    z = (z * (three - u)) >> static_cast<unsigned>(F + 1);
  }
  const BigInt s = (y * z) >> static_cast<unsigned>(F);
  return round_p(s, (e + p - 1) / 2 - F, prec).value;
}

}  // namespace tcvar::fp
