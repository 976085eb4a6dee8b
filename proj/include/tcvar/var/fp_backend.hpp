#pragma once

#include <string>

#include "tcvar/error.hpp"
#include "tcvar/fp/ops.hpp"
#include "tcvar/fp/transcendental.hpp"
#include "tcvar/var/ops.hpp"

namespace tcvar::var {

/// Reference evaluation with the p-bit arithmetic.
class FpBackend {
public:
  using Value = FpNum;

  explicit FpBackend(Precision p) : p_(p) {}
  Precision precision() const { return p_; }

  Value cst(const FpNum& x) const { return x; }
  Value add(const Value& a, const Value& b) const { return fp::fp_add(a, b); }
  Value sub(const Value& a, const Value& b) const { return fp::fp_sub(a, b); }
  Value mul(const Value& a, const Value& b) const { return fp::fp_mul(a, b); }
  Value div(const Value& a, const Value& b) const { return fp::fp_div(a, b); }
  Value iter_add(const std::vector<Value>& xs) const { return fp::fp_iter_add(xs); }
  Value exp(const Value& a) const { return fp::fp_exp(a).value; }
  Value sqrt(const Value& a) const { return fp::fp_sqrt(a); }
  Value guarded_div(const Value& g, const Value& a, const Value& b) const {
    return g.is_zero() ? FpNum::zero(p_) : fp::fp_div(a, b);
  }
  void check_row_sum(const Value& s) const {
    if (s.is_zero()) throw RowSumZero("attention row sum rounded to zero");
  }
  void begin_layer(const std::string&, LayerKind) {}
  std::vector<Value> end_layer(std::vector<Value> outs) { return outs; }

private:
  Precision p_;
};

}  // namespace tcvar::var
