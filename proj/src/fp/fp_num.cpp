#include "tcvar/fp/fp_num.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "tcvar/error.hpp"

namespace tcvar::fp {

Precision::Precision(int bits, int max_bits) : bits_(bits) {
  if (bits < 2 || bits > max_bits) {
    throw InvalidPrecision("precision " + std::to_string(bits) + " outside [2, " +
                           std::to_string(max_bits) + "]");
  }
}

FpNum::FpNum(std::int64_t m, std::int64_t e, Precision p) : m_(m), e_(e), p_(p) {
  const std::int64_t mag = m < 0 ? -m : m;
  if (m == 0) {
    if (e != 0) throw InvalidFpNum("zero must carry exponent 0");
    return;
  }
  if (mag < p.min_significand() || mag > p.max_significand()) {
    throw InvalidFpNum("significand " + std::to_string(m) + " not normalised for p=" +
                       std::to_string(p.bits()));
  }
  if (e < p.min_exponent() || e > p.max_exponent()) {
    throw InvalidFpNum("exponent " + std::to_string(e) + " out of range for p=" +
                       std::to_string(p.bits()));
  }
}

FpNum FpNum::one(Precision p) { return FpNum(p.min_significand(), -(p.bits() - 1), p); }

FpNum FpNum::max_magnitude(Precision p, bool negative) {
  const std::int64_t m = p.max_significand();
  return FpNum(negative ? -m : m, p.max_exponent(), p);
}

double FpNum::to_double() const {
  if (m_ == 0) return 0.0;
  const std::int64_t e = std::clamp<std::int64_t>(e_, -2000, 2000);
  return std::ldexp(static_cast<double>(m_), static_cast<int>(e));
}

std::string FpNum::str() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const FpNum& x) {
  return os << "FpNum(" << x.m() << ", " << x.e() << ", p=" << x.precision().bits() << ")";
}

namespace {

std::int64_t bit_length(const BigInt& mag) {
  return mag == 0 ? 0 : static_cast<std::int64_t>(boost::multiprecision::msb(mag)) + 1;
}

}  // namespace

Rounded round_p(const BigInt& m, std::int64_t e, Precision p, int sticky) {
  if (m == 0) {
    return {FpNum::zero(p), sticky != 0 ? RangeEvent::Underflow : RangeEvent::None};
  }
  const bool negative = m < 0;
  BigInt mag = negative ? BigInt(-m) : m;
  const std::int64_t len = bit_length(mag);
  const int bits = p.bits();

  std::int64_t exp = e;
  if (len > bits) {
    const auto shift = static_cast<unsigned>(len - bits);
    BigInt q = mag >> shift;
    const BigInt rem = mag - (q << shift);
    const BigInt half = BigInt(1) << (shift - 1);
    const int mag_sticky = negative ? -sticky : sticky;
    bool up;
    if (rem != half) {
      up = rem > half;
    } else if (mag_sticky != 0) {
      up = mag_sticky > 0;
    } else {
      up = (q & 1) != 0;
    }
    if (up) {
      q += 1;
      if (bit_length(q) > bits) {
        q >>= 1;
        exp += 1;
      }
    }
    mag = q;
    exp += static_cast<std::int64_t>(shift);
  } else {
    mag <<= static_cast<unsigned>(bits - len);
    exp -= bits - len;
  }

  if (exp > p.max_exponent()) return {FpNum::max_magnitude(p, negative), RangeEvent::Overflow};
  if (exp < p.min_exponent()) return {FpNum::zero(p), RangeEvent::Underflow};
  const auto sig = static_cast<std::int64_t>(mag);
  return {FpNum(negative ? -sig : sig, exp, p), RangeEvent::None};
}

Rounded round_rational(const BigInt& num, const BigInt& den, Precision p) {
  if (den == 0) throw DivisionByZero("round_rational with zero denominator");
  if (num == 0) return {FpNum::zero(p), RangeEvent::None};
  const int sign = ((num < 0) != (den < 0)) ? -1 : 1;
  const BigInt a = num < 0 ? BigInt(-num) : num;
  const BigInt b = den < 0 ? BigInt(-den) : den;
  // Enough quotient bits that the remainder only acts as a sticky bit.
  const std::int64_t shift = p.bits() + 3 - (bit_length(a) - bit_length(b));
  BigInt n2 = a, d2 = b;
  if (shift >= 0) {
    n2 <<= static_cast<unsigned>(shift);
  } else {
    d2 <<= static_cast<unsigned>(-shift);
  }
  const BigInt q = n2 / d2;
  const BigInt r = n2 - q * d2;
  return round_p(sign * q, -shift, p, r != 0 ? sign : 0);
}

FpNum from_double(double v, Precision p) {
  if (!std::isfinite(v)) throw InvalidFpNum("non-finite double");
  if (v == 0.0) return FpNum::zero(p);
  int exp = 0;
  const double frac = std::frexp(v, &exp);
  const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  return round_p(BigInt(mant), exp - 53, p).value;
}

}  // namespace tcvar::fp
