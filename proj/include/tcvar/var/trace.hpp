#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tcvar/var/ops.hpp"

namespace tcvar::var {

enum class TraceOp : std::uint8_t { Input, Const, Add, Sub, Mul, Div, IterAdd, Exp, Sqrt, GuardedDiv };
const char* to_string(TraceOp op);

struct TraceNode {
  TraceOp op;
  std::vector<std::uint32_t> args;
  std::optional<FpNum> value;  // Const only
};

/// Records the operation sequence of a model run instead of evaluating it.
class TraceBackend {
public:
  using Value = std::uint32_t;

  explicit TraceBackend(Precision p) : p_(p) {}
  Precision precision() const { return p_; }

  Value input();
  Value cst(const FpNum& x);
  Value add(Value a, Value b) { return push(TraceOp::Add, {a, b}); }
  Value sub(Value a, Value b) { return push(TraceOp::Sub, {a, b}); }
  Value mul(Value a, Value b) { return push(TraceOp::Mul, {a, b}); }
  Value div(Value a, Value b) { return push(TraceOp::Div, {a, b}); }
  Value iter_add(const std::vector<Value>& xs) { return push(TraceOp::IterAdd, xs); }
  Value exp(Value a) { return push(TraceOp::Exp, {a}); }
  Value sqrt(Value a) { return push(TraceOp::Sqrt, {a}); }
  Value guarded_div(Value g, Value a, Value b) { return push(TraceOp::GuardedDiv, {g, a, b}); }
  void check_row_sum(Value) {}
  void begin_layer(const std::string&, LayerKind) {}
  std::vector<Value> end_layer(std::vector<Value> outs) { return outs; }

  const std::vector<TraceNode>& nodes() const { return nodes_; }
  std::size_t input_count() const { return inputs_; }

private:
  Value push(TraceOp op, std::vector<std::uint32_t> args);

  Precision p_;
  std::vector<TraceNode> nodes_;
  std::size_t inputs_ = 0;
};

/// Evaluates every node of a trace with the reference arithmetic; inputs are
/// bound in creation order.
std::vector<FpNum> replay(const std::vector<TraceNode>& trace, const std::vector<FpNum>& inputs, Precision p);

/// Operation counts by kind, for reports.
std::string summarize(const std::vector<TraceNode>& trace);

}  // namespace tcvar::var
