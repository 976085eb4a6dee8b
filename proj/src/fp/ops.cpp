#include "tcvar/fp/ops.hpp"

#include <algorithm>

#include "tcvar/error.hpp"

namespace tcvar::fp {

const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::Less: return "LT";
    case Ordering::Equal: return "EQ";
    case Ordering::Greater: return "GT";
  }
  return "?";
}

namespace {

void require_same_precision(std::span<const FpNum> xs) {
  for (const auto& x : xs) {
    if (!(x.precision() == xs.front().precision())) {
      throw PrecisionMismatch("operands carry different precisions");
    }
  }
}

int ceil_log2(std::size_t n) {
  int r = 0;
  while ((std::size_t{1} << r) < n) ++r;
  return r;
}

int sign_of(const BigInt& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

struct Term {
  std::int64_t m;
  std::int64_t e;
};

// Sums terms[i..] (sorted by exponent, descending). Terms far enough below a
// nonzero partial sum are reduced to the sign of their own exact sum.
Dyadic sum_sorted(const std::vector<Term>& terms, std::size_t i, int p, int log_n,
                  int& sticky) {
  BigInt acc = 0;
  std::int64_t base = 0;
  for (; i < terms.size(); ++i) {
    const Term& t = terms[i];
    if (acc == 0) {
      acc = t.m;
      base = t.e;
      continue;
    }
    if (t.e + p + log_n <= base - p - 3) break;
    acc <<= static_cast<unsigned>(base - t.e);
    acc += t.m;
    base = t.e;
  }
  sticky = 0;
  if (acc != 0 && i < terms.size()) {
    int rest_sticky = 0;
    const Dyadic rest = sum_sorted(terms, i, p, log_n, rest_sticky);
    sticky = rest.m != 0 ? sign_of(rest.m) : rest_sticky;
  }
  if (acc == 0) base = 0;
  return {acc, base};
}

}  // namespace

Dyadic exact_sum(std::span<const FpNum> xs, int& sticky) {
  std::vector<Term> terms;
  terms.reserve(xs.size());
  for (const auto& x : xs) {
    if (!x.is_zero()) terms.push_back({x.m(), x.e()});
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return a.e > b.e; });
  const int p = xs.empty() ? 2 : xs.front().precision().bits();
  return sum_sorted(terms, 0, p, ceil_log2(std::max<std::size_t>(terms.size(), 1)), sticky);
}

Rounded fp_iter_add_rounded(std::span<const FpNum> xs) {
  if (xs.empty()) throw EmptyInput("fp_iter_add of an empty list");
  require_same_precision(xs);
  int sticky = 0;
  const Dyadic s = exact_sum(xs, sticky);
  return round_p(s.m, s.e, xs.front().precision(), sticky);
}

FpNum fp_iter_add(std::span<const FpNum> xs) { return fp_iter_add_rounded(xs).value; }

Rounded fp_iter_mul_rounded(std::span<const FpNum> xs) {
  if (xs.empty()) throw EmptyInput("fp_iter_mul of an empty list");
  require_same_precision(xs);
  const Precision p = xs.front().precision();
  BigInt m = 1;
  std::int64_t e = 0;
  for (const auto& x : xs) {
    if (x.is_zero()) return {FpNum::zero(p), RangeEvent::None};
    m *= x.m();
    e += x.e();
  }
  return round_p(m, e, p);
}

FpNum fp_iter_mul(std::span<const FpNum> xs) { return fp_iter_mul_rounded(xs).value; }

Rounded fp_add_rounded(const FpNum& a, const FpNum& b) {
  const FpNum xs[] = {a, b};
  return fp_iter_add_rounded(xs);
}

Rounded fp_mul_rounded(const FpNum& a, const FpNum& b) {
  const FpNum xs[] = {a, b};
  return fp_iter_mul_rounded(xs);
}

FpNum fp_add(const FpNum& a, const FpNum& b) { return fp_add_rounded(a, b).value; }
FpNum fp_sub(const FpNum& a, const FpNum& b) { return fp_add(a, b.negated()); }
FpNum fp_mul(const FpNum& a, const FpNum& b) { return fp_mul_rounded(a, b).value; }

int division_fraction_bits(Precision p) { return 2 * p.bits() + 2; }

Rounded fp_div_rounded(const FpNum& a, const FpNum& b) {
  const FpNum xs[] = {a, b};
  require_same_precision(xs);
  if (b.is_zero()) throw DivisionByZero("fp_div by zero");
  const Precision p = a.precision();
  if (a.is_zero()) return {FpNum::zero(p), RangeEvent::None};
  const int frac = division_fraction_bits(p);
  const BigInt num = BigInt(a.abs().m()) << frac;
  const BigInt q = num / BigInt(b.abs().m());
  const bool negative = a.is_negative() != b.is_negative();
  return round_p(negative ? BigInt(-q) : q, a.e() - b.e() - frac, p);
}

FpNum fp_div(const FpNum& a, const FpNum& b) { return fp_div_rounded(a, b).value; }

Ordering fp_compare(const FpNum& a, const FpNum& b) {
  const FpNum xs[] = {a, b};
  require_same_precision(xs);
  auto sgn = [](const FpNum& x) { return x.is_zero() ? 0 : (x.is_negative() ? -1 : 1); };
  const int sa = sgn(a), sb = sgn(b);
  if (sa != sb) return sa < sb ? Ordering::Less : Ordering::Greater;
  if (sa == 0) return Ordering::Equal;
  // Same sign, both normalised: magnitude order is (e, |m|) lexicographic.
  int mag_cmp = 0;
  if (a.e() != b.e()) {
    mag_cmp = a.e() < b.e() ? -1 : 1;
  } else if (a.abs().m() != b.abs().m()) {
    mag_cmp = a.abs().m() < b.abs().m() ? -1 : 1;
  }
  if (sa < 0) mag_cmp = -mag_cmp;
  if (mag_cmp == 0) return Ordering::Equal;
  return mag_cmp < 0 ? Ordering::Less : Ordering::Greater;
}

FpNum fp_floor(const FpNum& a) {
  if (a.e() >= 0 || a.is_zero()) return a;
  const auto shift = static_cast<unsigned>(-a.e());
  const BigInt mag = a.abs().m();
  BigInt q = mag >> shift;
  if (a.is_negative()) {
    if ((q << shift) != mag) q += 1;
    q = -q;
  }
  return round_p(q, 0, a.precision()).value;
}

}  // namespace tcvar::fp
