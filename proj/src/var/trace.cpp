#include "tcvar/var/trace.hpp"

#include <array>

#include "tcvar/var/fp_backend.hpp"

namespace tcvar::var {

const char* to_string(TraceOp op) {
  switch (op) {
    case TraceOp::Input: return "input";
    case TraceOp::Const: return "const";
    case TraceOp::Add: return "add";
    case TraceOp::Sub: return "sub";
    case TraceOp::Mul: return "mul";
    case TraceOp::Div: return "div";
    case TraceOp::IterAdd: return "iter_add";
    case TraceOp::Exp: return "exp";
    case TraceOp::Sqrt: return "sqrt";
    case TraceOp::GuardedDiv: return "guarded_div";
  }
  return "?";
}

TraceBackend::Value TraceBackend::input() {
  ++inputs_;
  return push(TraceOp::Input, {});
}

TraceBackend::Value TraceBackend::cst(const FpNum& x) {
  nodes_.push_back(TraceNode{TraceOp::Const, {}, x});
  return static_cast<Value>(nodes_.size() - 1);
}

TraceBackend::Value TraceBackend::push(TraceOp op, std::vector<std::uint32_t> args) {
  nodes_.push_back(TraceNode{op, std::move(args), std::nullopt});
  return static_cast<Value>(nodes_.size() - 1);
}

std::vector<FpNum> replay(const std::vector<TraceNode>& trace, const std::vector<FpNum>& inputs, Precision p) {
  const FpBackend be(p);
  std::vector<FpNum> v;
  v.reserve(trace.size());
  std::size_t next_input = 0;
  std::vector<FpNum> list;
  for (const auto& n : trace) {
    auto arg = [&](std::size_t i) -> const FpNum& { return v[n.args[i]]; };
    switch (n.op) {
      case TraceOp::Input:
        if (next_input >= inputs.size()) throw ArityMismatch("trace has more inputs than were supplied");
        v.push_back(inputs[next_input++]);
        break;
      case TraceOp::Const: v.push_back(*n.value); break;
      case TraceOp::Add: v.push_back(be.add(arg(0), arg(1))); break;
      case TraceOp::Sub: v.push_back(be.sub(arg(0), arg(1))); break;
      case TraceOp::Mul: v.push_back(be.mul(arg(0), arg(1))); break;
      case TraceOp::Div: v.push_back(be.div(arg(0), arg(1))); break;
      case TraceOp::IterAdd:
        list.clear();
        for (auto a : n.args) list.push_back(v[a]);
        v.push_back(be.iter_add(list));
        break;
      case TraceOp::Exp: v.push_back(be.exp(arg(0))); break;
      case TraceOp::Sqrt: v.push_back(be.sqrt(arg(0))); break;
      case TraceOp::GuardedDiv: v.push_back(be.guarded_div(arg(0), arg(1), arg(2))); break;
    }
  }
  if (next_input != inputs.size()) throw ArityMismatch("trace has fewer inputs than were supplied");
  return v;
}

std::string summarize(const std::vector<TraceNode>& trace) {
  std::array<std::size_t, 10> counts{};
  for (const auto& n : trace) ++counts[static_cast<std::size_t>(n.op)];
  std::string s;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    if (!s.empty()) s += ", ";
    s += std::string(to_string(static_cast<TraceOp>(i))) + "=" + std::to_string(counts[i]);
  }
  return s;
}

}  // namespace tcvar::var
