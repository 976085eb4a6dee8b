#pragma once

#include <string>
#include <variant>
#include <vector>

#include "tcvar/compiler/report.hpp"
#include "tcvar/gadgets/fp_gadgets.hpp"
#include "tcvar/gadgets/transcendental.hpp"

namespace tcvar::cc {

using fp::FpNum;
using fp::Precision;

/// Model backend that emits gadgets. A value is either a compile-time
/// constant or a bundle of wires; an op folds through the reference
/// arithmetic only when every operand is constant.
///
/// Each layer is a circuit region, recorded as a report row. With alignment
/// on, a layer's outputs are buffered up to (input level + its bound), so the
/// total depth is the sum of bounds along the layer chain whatever the shapes.
class GateBackend {
public:
  using Value = std::variant<FpNum, gad::Bundle>;

  GateBackend(gad::Builder& b, Precision p, gad::TransImpl impl, const gad::GadgetConstants& constants, bool align);

  Precision precision() const { return p_; }
  gad::Builder& builder() { return b_; }

  Value cst(const FpNum& x) const { return x; }
  Value add(const Value& a, const Value& b);
  Value sub(const Value& a, const Value& b);
  Value mul(const Value& a, const Value& b);
  Value div(const Value& a, const Value& b);
  Value iter_add(const std::vector<Value>& xs);
  Value exp(const Value& a);
  Value sqrt(const Value& a);
  Value guarded_div(const Value& g, const Value& a, const Value& b);
  void check_row_sum(const Value&) {}  // data dependent; the reference reports it

  void begin_layer(const std::string& name, LayerKind kind);
  std::vector<Value> end_layer(std::vector<Value> outs);

  /// Row of a one-hot selection: bit j of the result is the OR of the select
  /// wires whose candidate has bit j set.
  Value select(const std::vector<gad::Wire>& onehot, const std::vector<FpNum>& candidates);

  gad::Bundle bundle(const Value& v);
  const std::vector<LayerRow>& rows() const { return rows_; }

private:
  void touch(const Value& v);

  gad::Builder& b_;
  Precision p_;
  gad::TransImpl impl_;
  const gad::GadgetConstants& k_;
  bool align_;

  bool in_layer_ = false;
  LayerRow row_;
  gad::Wire region_start_ = 0;
  std::uint32_t in_level_ = 0;
  std::vector<LayerRow> rows_;
};

}  // namespace tcvar::cc
