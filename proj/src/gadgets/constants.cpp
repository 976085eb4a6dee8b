#include "tcvar/gadgets/constants.hpp"

#include <algorithm>
#include <functional>

namespace tcvar::gad {

namespace {

using Build = std::function<std::vector<Wire>(Builder&, const std::vector<Bundle>&)>;

GadgetMetric measure(const std::string& name, Precision p, DepthPolicy policy, std::size_t arity, const Build& f) {
  net::Circuit c({.dedup = true, .metrics_only = false, .max_gates = 0});
  Builder b(c, policy);
  std::vector<Bundle> ins;
  for (std::size_t i = 0; i < arity; ++i) ins.push_back(input_bundle(b, p));
  const auto outs = f(b, ins);
  c.set_outputs(outs);
  GadgetMetric m{name, 0, 0};
  for (Wire w : outs) m.depth = std::max(m.depth, c.level(w));
  m.size = c.size();
  return m;
}

Build binary(Bundle (*op)(Builder&, const Bundle&, const Bundle&)) {
  return [op](Builder& b, const std::vector<Bundle>& in) { return op(b, in[0], in[1]).bits; };
}

}  // namespace

GadgetConstants measure_constants(Precision p, DepthPolicy policy, TransImpl impl) {
  GadgetConstants k;
  k.p = p.bits();
  k.policy = policy;
  k.impl = resolve(impl, p);
  auto& g = k.gadgets;
  g.push_back(measure("add", p, policy, 2, binary(g_add)));
  g.push_back(measure("mul", p, policy, 2, binary(g_mul)));
  g.push_back(measure("div", p, policy, 2, binary(g_div)));
  g.push_back(measure("compare", p, policy, 2, [](Builder& b, const std::vector<Bundle>& in) {
    const auto c = g_compare(b, in[0], in[1]);
    return std::vector<Wire>{c.lt, c.gt};
  }));
  g.push_back(measure("floor", p, policy, 1, [](Builder& b, const std::vector<Bundle>& in) { return g_floor(b, in[0]).bits; }));
  for (const auto& m : g) k.d_std = std::max(k.d_std, m.depth);

  auto iter_add = [](Builder& b, const std::vector<Bundle>& in) { return g_iter_add(b, in).bits; };
  g.push_back(measure("iter_add[n=8]", p, policy, 8, iter_add));
  k.d_add = g.back().depth;
  g.push_back(measure("iter_add[n=64]", p, policy, 64, iter_add));
  k.d_add_n64 = g.back().depth;

  const std::size_t nmul = policy == DepthPolicy::Strict ? 2 : 4;
  g.push_back(measure("iter_mul[n=" + std::to_string(nmul) + "]", p, policy, nmul,
                      [](Builder& b, const std::vector<Bundle>& in) { return g_iter_mul(b, in).bits; }));
  k.d_mul = g.back().depth;

  const TransImpl ti = k.impl;
  g.push_back(measure(std::string("exp[") + to_string(ti) + "]", p, policy, 1,
                      [ti](Builder& b, const std::vector<Bundle>& in) { return g_exp(b, in[0], ti).bits; }));
  k.d_exp = g.back().depth;
  g.push_back(measure(std::string("sqrt[") + to_string(ti) + "]", p, policy, 1, [ti](Builder& b, const std::vector<Bundle>& in) {
    auto s = g_sqrt(b, in[0], ti);
    s.value.bits.push_back(s.domain_error);
    return s.value.bits;
  }));
  k.d_sqrt = g.back().depth;
  return k;
}

}  // namespace tcvar::gad
