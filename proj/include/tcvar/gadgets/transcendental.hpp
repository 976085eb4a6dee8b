#pragma once

#include <optional>
#include <string_view>

#include "tcvar/gadgets/fp_gadgets.hpp"

namespace tcvar::gad {

/// SERIES follows the reference fixed-point algorithm gate for gate (range
/// reduction, Horner series / Newton steps, one rounding). TABLE decodes
/// the 2p+3 input bits against every valid encoding; exact as well, and far
/// smaller for small p. AUTO picks TABLE up to kTableMaxPrecision.
enum class TransImpl { Auto, Series, Table };

inline constexpr int kTableMaxPrecision = 6;

const char* to_string(TransImpl t);
std::optional<TransImpl> parse_trans_impl(std::string_view s);
TransImpl resolve(TransImpl t, Precision p);

Bundle g_exp(Builder& b, const Bundle& x, TransImpl impl = TransImpl::Auto);

struct SqrtWires {
  Bundle value;        // zero for negative input
  Wire domain_error;   // 1 iff the input is negative
};
SqrtWires g_sqrt(Builder& b, const Bundle& x, TransImpl impl = TransImpl::Auto);

}  // namespace tcvar::gad
