#include "tcvar/fp/encoding.hpp"

#include <algorithm>

#include "tcvar/error.hpp"
#include "tcvar/fp/ops.hpp"

namespace tcvar::fp {

FpEncoding::FpEncoding(Precision p, std::vector<std::uint8_t> bits) : p_(p), bits_(std::move(bits)) {
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

std::string FpEncoding::str() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

FpEncoding encode(const FpNum& x) {
  const EncodingLayout lay(x.precision());
  std::vector<std::uint8_t> bits(lay.width(), 0);
  if (x.is_zero()) {
    bits[lay.zero_flag()] = 1;
    return FpEncoding(x.precision(), std::move(bits));
  }
  bits[lay.sign()] = x.is_negative() ? 1 : 0;
  const std::int64_t mag = x.abs().m();
  for (int i = 0; i < lay.p; ++i) bits[lay.magnitude(i)] = (mag >> i) & 1;
  const auto ue = static_cast<std::uint64_t>(x.e());
  for (int i = 0; i <= lay.p; ++i) bits[lay.exponent(i)] = (ue >> i) & 1;
  return FpEncoding(x.precision(), std::move(bits));
}

FpNum decode(const FpEncoding& enc) {
  const Precision p = enc.precision();
  const EncodingLayout lay(p);
  if (enc.width() != lay.width()) {
    throw MalformedEncoding("encoding width " + std::to_string(enc.width()) + ", expected " +
                            std::to_string(lay.width()));
  }
  if (enc[lay.zero_flag()]) {
    for (std::size_t i = 0; i < enc.width(); ++i) {
      if (i != lay.zero_flag() && enc[i]) {
        throw MalformedEncoding("zero flag set with nonzero payload bit " + std::to_string(i));
      }
    }
    return FpNum::zero(p);
  }
  std::int64_t mag = 0;
  for (int i = 0; i < lay.p; ++i) mag |= static_cast<std::int64_t>(enc[lay.magnitude(i)]) << i;
  if (mag < p.min_significand()) throw MalformedEncoding("significand MSB clear");
  std::int64_t e = 0;
  for (int i = 0; i <= lay.p; ++i) e |= static_cast<std::int64_t>(enc[lay.exponent(i)]) << i;
  if (enc[lay.exponent(lay.p)]) e -= std::int64_t{1} << (lay.p + 1);
  return FpNum(enc[lay.sign()] ? -mag : mag, e, p);
}

std::vector<FpNum> enumerate_all(Precision p) {
  std::vector<FpNum> out;
  out.push_back(FpNum::zero(p));
  for (std::int64_t e = p.min_exponent(); e <= p.max_exponent(); ++e) {
    for (std::int64_t m = p.min_significand(); m <= p.max_significand(); ++m) {
      out.emplace_back(m, e, p);
      out.emplace_back(-m, e, p);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const FpNum& a, const FpNum& b) { return fp_compare(a, b) == Ordering::Less; });
  return out;
}

}  // namespace tcvar::fp
