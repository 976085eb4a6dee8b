#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace tcvar::fp {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr int kDefaultMaxPrecision = 32;

/// Significand width `p` of the number system. Every FpNum, encoding and
/// gadget is tied to one precision.
class Precision {
public:
  explicit Precision(int bits, int max_bits = kDefaultMaxPrecision);

  int bits() const noexcept { return bits_; }

  std::int64_t min_exponent() const noexcept { return -(std::int64_t{1} << bits_); }
  std::int64_t max_exponent() const noexcept { return (std::int64_t{1} << bits_) - 1; }
  std::int64_t min_significand() const noexcept { return std::int64_t{1} << (bits_ - 1); }
  std::int64_t max_significand() const noexcept { return (std::int64_t{1} << bits_) - 1; }

  friend bool operator==(Precision a, Precision b) noexcept { return a.bits_ == b.bits_; }

private:
  int bits_;
};

/// A p-bit floating point value m * 2^e.
///
/// Invariants: m is zero or |m| in [2^(p-1), 2^p); e in [-2^p, 2^p);
/// zero is canonical (m = 0 implies e = 0).
class FpNum {
public:
  /// Validating constructor; throws InvalidFpNum when the invariants fail.
  FpNum(std::int64_t m, std::int64_t e, Precision p);

  static FpNum zero(Precision p) { return FpNum(0, 0, p); }
  static FpNum one(Precision p);
  /// Largest-magnitude representable value with the given sign.
  static FpNum max_magnitude(Precision p, bool negative = false);

  std::int64_t m() const noexcept { return m_; }
  std::int64_t e() const noexcept { return e_; }
  Precision precision() const noexcept { return p_; }

  bool is_zero() const noexcept { return m_ == 0; }
  bool is_negative() const noexcept { return m_ < 0; }

  FpNum negated() const { return FpNum(-m_, e_, p_); }
  FpNum abs() const { return FpNum(m_ < 0 ? -m_ : m_, e_, p_); }

  /// Nearest double; exact whenever the exponent fits a double.
  double to_double() const;
  std::string str() const;

  friend bool operator==(const FpNum& a, const FpNum& b) noexcept {
    return a.m_ == b.m_ && a.e_ == b.e_ && a.p_ == b.p_;
  }

private:
  std::int64_t m_;
  std::int64_t e_;
  Precision p_;
};

std::ostream& operator<<(std::ostream& os, const FpNum& x);

/// Out-of-range events raised by rounding.
enum class RangeEvent : std::uint8_t { None, Overflow, Underflow };

struct Rounded {
  FpNum value;
  RangeEvent event = RangeEvent::None;

  bool flagged() const noexcept { return event != RangeEvent::None; }
};

/// Rounds the exact value m * 2^e to p bits, half-to-even. `sticky` stands
/// for an infinitesimal of that sign added to the value (used by the exact
/// summation when far-below terms only decide ties). Normalised exponents
/// above 2^p - 1 saturate to the largest magnitude; below -2^p flush to zero.
Rounded round_p(const BigInt& m, std::int64_t e, Precision p, int sticky = 0);

/// Nearest p-bit value to num / den (den != 0), same rules as round_p.
Rounded round_rational(const BigInt& num, const BigInt& den, Precision p);

/// Exact conversion of a finite double followed by round_p.
FpNum from_double(double v, Precision p);

/// Exact value as a (significand, exponent) pair with arbitrary significand.
struct Dyadic {
  BigInt m;
  std::int64_t e = 0;
};

}  // namespace tcvar::fp
