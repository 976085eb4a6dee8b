#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tcvar/fp/fp_num.hpp"

namespace tcvar::fp {

/// Fixed bit layout of an FpNum, most-significant-first:
///
///   index 0            sign of the significand (1 = negative)
///   index 1 .. p       |m|, MSB first
///   index p + 1        zero flag
///   index p + 2 .. 2p+2  exponent, (p+1)-bit two's complement, MSB first
///
/// Zero is encoded as all bits clear except the zero flag.
struct EncodingLayout {
  int p;

  explicit EncodingLayout(Precision prec) : p(prec.bits()) {}

  std::size_t width() const { return static_cast<std::size_t>(2 * p + 3); }
  std::size_t sign() const { return 0; }
  /// Bit i of |m| counted from the LSB (i in [0, p)).
  std::size_t magnitude(int i) const { return static_cast<std::size_t>(p - i); }
  std::size_t zero_flag() const { return static_cast<std::size_t>(p + 1); }
  /// Bit i of the exponent counted from the LSB (i in [0, p]).
  std::size_t exponent(int i) const { return static_cast<std::size_t>(2 * p + 2 - i); }
};

class FpEncoding {
public:
  FpEncoding(Precision p, std::vector<std::uint8_t> bits);

  Precision precision() const noexcept { return p_; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  std::size_t width() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }

  std::string str() const;

  friend bool operator==(const FpEncoding& a, const FpEncoding& b) {
    return a.p_ == b.p_ && a.bits_ == b.bits_;
  }

private:
  Precision p_;
  std::vector<std::uint8_t> bits_;
};

FpEncoding encode(const FpNum& x);

/// Throws MalformedEncoding on a wrong width or any non-canonical layout.
FpNum decode(const FpEncoding& bits);

/// Every valid FpNum at precision p, in ascending value order. Intended for
/// exhaustive tests at small p.
std::vector<FpNum> enumerate_all(Precision p);

}  // namespace tcvar::fp
