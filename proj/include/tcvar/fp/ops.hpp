#pragma once

#include <span>
#include <vector>

#include "tcvar/fp/fp_num.hpp"

namespace tcvar::fp {

enum class Ordering { Less, Equal, Greater };

const char* to_string(Ordering o);

// Binary operations. All of them compute the exact result first and round
// once with round_p; the `_rounded` variants also report range events.
FpNum fp_add(const FpNum& a, const FpNum& b);
FpNum fp_sub(const FpNum& a, const FpNum& b);
FpNum fp_mul(const FpNum& a, const FpNum& b);
FpNum fp_div(const FpNum& a, const FpNum& b);
Rounded fp_add_rounded(const FpNum& a, const FpNum& b);
Rounded fp_mul_rounded(const FpNum& a, const FpNum& b);
Rounded fp_div_rounded(const FpNum& a, const FpNum& b);

Ordering fp_compare(const FpNum& a, const FpNum& b);
FpNum fp_floor(const FpNum& a);

// Iterated operations: exact sum / product of the whole list, one rounding.
FpNum fp_iter_add(std::span<const FpNum> xs);
FpNum fp_iter_mul(std::span<const FpNum> xs);
Rounded fp_iter_add_rounded(std::span<const FpNum> xs);
Rounded fp_iter_mul_rounded(std::span<const FpNum> xs);

/// Exact sum of the list (plus tie-breaking sticky), before rounding.
/// Exposed so callers can inspect cancellation behaviour in tests.
Dyadic exact_sum(std::span<const FpNum> xs, int& sticky);

/// Number of fractional bits the quotient is truncated to before rounding.
int division_fraction_bits(Precision p);

}  // namespace tcvar::fp
