#include "tcvar/compiler/report.hpp"

#include <json.hpp>
#include <sstream>

namespace tcvar::cc {

std::uint32_t layer_bound(LayerKind k, const gad::GadgetConstants& c) {
  const std::uint32_t s = c.d_std, a = c.d_add;
  switch (k) {
    case LayerKind::Attention: return 3 * (s + a) + c.d_exp;
    case LayerKind::Mlp: return 2 * s + a;
    case LayerKind::LayerNorm: return 5 * s + 2 * a + c.d_sqrt;
    case LayerKind::UpInterpolation: return 2 * s + a;
    case LayerKind::Conv: return s + a;
    case LayerKind::Lookup: return s + a;
    case LayerKind::Aggregate: return a;
    case LayerKind::Residual: return s;
  }
  return 0;
}

const char* bound_formula(LayerKind k) {
  switch (k) {
    case LayerKind::Attention: return "3*(d_std+d_add)+d_exp";
    case LayerKind::Mlp: return "2*d_std+d_add";
    case LayerKind::LayerNorm: return "5*d_std+2*d_add+d_sqrt";
    case LayerKind::UpInterpolation: return "2*d_std+d_add";
    case LayerKind::Conv: return "d_std+d_add";
    case LayerKind::Lookup: return "d_std+d_add";
    case LayerKind::Aggregate: return "d_add";
    case LayerKind::Residual: return "d_std";
  }
  return "?";
}

std::vector<BoundVerdict> check_bounds(const DepthReport& r) {
  std::vector<BoundVerdict> out;
  for (const auto& row : r.layers) {
    const auto bound = layer_bound(row.kind, r.constants);
    out.push_back({row.name, row.depth, bound, row.depth <= bound});
  }
  return out;
}

bool all_pass(const std::vector<BoundVerdict>& v) {
  for (const auto& x : v) {
    if (!x.pass) return false;
  }
  return true;
}

std::string report_json(const DepthReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  const auto& c = r.constants;
  j["constants"] = {{"p", c.p},           {"policy", gad::to_string(c.policy)}, {"transcendental", gad::to_string(c.impl)},
                    {"d_std", c.d_std},   {"d_add", c.d_add},                   {"d_mul", c.d_mul},
                    {"d_exp", c.d_exp},   {"d_sqrt", c.d_sqrt}};
  ordered_json gadgets = ordered_json::array();
  for (const auto& g : c.gadgets) gadgets.push_back({{"name", g.name}, {"depth", g.depth}, {"size", g.size}});
  j["constants"]["gadgets"] = gadgets;
  const auto verdicts = check_bounds(r);
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < r.layers.size(); ++i) {
    const auto& l = r.layers[i];
    rows.push_back({{"name", l.name},
                    {"kind", var::to_string(l.kind)},
                    {"depth", l.depth},
                    {"size", l.size},
                    {"bound", l.bound},
                    {"bound_formula", bound_formula(l.kind)},
                    {"pass", verdicts[i].pass}});
  }
  j["per_layer"] = rows;
  const auto& t = r.totals;
  j["totals"] = {{"depth", t.depth}, {"size", t.size},     {"raw_size", t.raw_size}, {"n", t.n},
                 {"p", t.p},         {"policy", gad::to_string(t.policy)}, {"inputs", t.inputs}, {"outputs", t.outputs}};
  j["all_bounds_pass"] = all_pass(verdicts);
  return j.dump(2) + "\n";
}

std::string report_csv(const DepthReport& r) {
  std::ostringstream os;
  os << "name,kind,depth,size,bound,verdict\n";
  const auto v = check_bounds(r);
  for (std::size_t i = 0; i < r.layers.size(); ++i) {
    const auto& l = r.layers[i];
    os << l.name << ',' << var::to_string(l.kind) << ',' << l.depth << ',' << l.size << ',' << v[i].bound << ','
       << (v[i].pass ? "pass" : "fail") << '\n';
  }
  return os.str();
}

}  // namespace tcvar::cc
