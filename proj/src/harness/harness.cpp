#include "tcvar/harness/harness.hpp"

#include <chrono>
#include <cmath>
#include <algorithm>
#include <functional>
#include <sstream>

#include "tcvar/error.hpp"
#include "tcvar/fp/encoding.hpp"
#include "tcvar/fp/ops.hpp"
#include "tcvar/fp/transcendental.hpp"
#include "tcvar/netlist/ops.hpp"

namespace tcvar::harness {

using fp::FpNum;

std::vector<var::Shape2> scales_for_tokens(std::size_t n) {
  if (n == 0) throw ConfigError("field 'n': must be at least 1");
  std::vector<var::Shape2> s;
  std::size_t total = 0;
  for (std::size_t side = 1; total < n; side *= 2) {
    s.push_back({side, side});
    total += side * side;
  }
  if (total == n) return s;
  return {{1, 1}, {1, n - 1}};
}

ScanPoint scan_point(const var::ModelConfig& base, const std::string& axis, std::size_t value, const ScanOptions& o) {
  var::ModelConfig cfg = base;
  if (axis == "n") {
    cfg.scales = scales_for_tokens(value);
  } else if (axis == "p") {
    cfg.p = static_cast<int>(value);
  } else {
    throw ConfigError("field 'axis': expected 'n' or 'p'");
  }
  var::validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = cc::compile_model(cfg, {.metrics_only = !o.evaluate, .align = true, .max_gates = o.max_gates});
  const auto t1 = std::chrono::steady_clock::now();
  ScanPoint pt{axis, value, cfg.tokens(), cfg.p, m.report.totals.depth, 0, m.report.totals.size,
               std::chrono::duration<double, std::milli>(t1 - t0).count(), std::nullopt};
  for (const auto& row : m.report.layers) {
    if (row.kind == var::LayerKind::Attention) pt.attention_depth = std::max(pt.attention_depth, row.depth);
  }
  if (o.evaluate) {
    std::vector<std::vector<std::uint8_t>> rows;
    for (std::uint64_t t = 0; t < 64; ++t) rows.push_back(cc::input_bits(cfg, cc::random_input(cfg, 1, t)));
    const auto e0 = std::chrono::steady_clock::now();
    cc::evaluate_values(m.circuit, fp::Precision(cfg.p), rows);
    pt.eval_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - e0).count();
  }
  return pt;
}

std::string scan_csv(const std::vector<ScanPoint>& pts, bool times) {
  std::ostringstream os;
  os << "axis,value,n,p,depth,attention_depth,size,compile_ms,eval_ms\n";
  for (const auto& q : pts) {
    os << q.axis << ',' << q.value << ',' << q.n << ',' << q.p << ',' << q.depth << ',' << q.attention_depth << ','
       << q.size << ',';
    if (times) {
      os << std::llround(q.compile_ms) << ',';
      if (q.eval_ms) os << std::llround(*q.eval_ms);
    } else {
      os << ',';
    }
    os << '\n';
  }
  return os.str();
}

namespace {

// One scatter-and-line panel at horizontal offset x0; log scales on request.
void svg_panel(std::ostringstream& os, double x0, const std::string& title, const std::vector<double>& xs,
               const std::vector<double>& ys, bool logx, bool logy) {
  const double w = 300, h = 220, m = 40;
  auto tx = [&](double v) { return logx ? std::log(v) : v; };
  auto ty = [&](double v) { return logy ? std::log(v) : v; };
  double xmin = tx(xs.front()), xmax = xmin, ymin = ty(ys.front()), ymax = ymin;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xmin = std::min(xmin, tx(xs[i]));
    xmax = std::max(xmax, tx(xs[i]));
    ymin = std::min(ymin, ty(ys[i]));
    ymax = std::max(ymax, ty(ys[i]));
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) {
    ymin -= 1;
    ymax += 1;
  }
  auto px = [&](double v) { return x0 + m + (tx(v) - xmin) / (xmax - xmin) * (w - 2 * m); };
  auto py = [&](double v) { return h - m - (ty(v) - ymin) / (ymax - ymin) * (h - 2 * m); };
  os << "<rect x='" << x0 << "' y='0' width='" << w << "' height='" << h << "' fill='white' stroke='#888'/>\n";
  os << "<text x='" << x0 + w / 2 << "' y='20' text-anchor='middle' font-size='13'>" << title << "</text>\n";
  os << "<polyline fill='none' stroke='#2060c0' points='";
  for (std::size_t i = 0; i < xs.size(); ++i) os << px(xs[i]) << ',' << py(ys[i]) << ' ';
  os << "'/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    os << "<circle cx='" << px(xs[i]) << "' cy='" << py(ys[i]) << "' r='3' fill='#2060c0'/>\n";
    os << "<text x='" << px(xs[i]) << "' y='" << h - m + 15 << "' text-anchor='middle' font-size='10'>" << xs[i]
       << "</text>\n";
    os << "<text x='" << px(xs[i]) + 5 << "' y='" << py(ys[i]) - 5 << "' font-size='10'>" << ys[i] << "</text>\n";
  }
}

}  // namespace

std::string scan_svg(const std::vector<ScanPoint>& pts) {
  if (pts.empty()) throw EmptyInput("nothing to plot");
  std::vector<double> xs, size, depth;
  for (const auto& q : pts) {
    xs.push_back(static_cast<double>(q.axis == "n" ? q.n : q.value));
    size.push_back(static_cast<double>(q.size));
    depth.push_back(static_cast<double>(q.depth));
  }
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='600' height='220' font-family='sans-serif'>\n";
  const std::string ax = pts.front().axis;
  svg_panel(os, 0, "size vs " + ax + " (log-log)", xs, size, true, true);
  svg_panel(os, 300, "depth vs " + ax, xs, depth, false, false);
  os << "</svg>\n";
  return os.str();
}

Fit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw EmptyInput("fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    syy += b * b;
  }
  const double dn = static_cast<double>(n);
  const double vx = sxx - sx * sx / dn, vy = syy - sy * sy / dn, cxy = sxy - sx * sy / dn;
  Fit f;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / dn;
  f.r2 = vy == 0 ? 1.0 : cxy * cxy / (vx * vy);
  return f;
}

const std::vector<std::string>& op_names() {
  static const std::vector<std::string> names{"add", "sub", "mul", "div", "compare", "floor", "exp", "sqrt"};
  return names;
}

namespace {

using gad::Bundle;
using gad::Builder;

std::string bits_of(const std::vector<FpNum>& xs) {
  std::string s;
  for (const auto& x : xs) {
    for (auto b : gad::encode_bits(x)) s.push_back(b ? '1' : '0');
  }
  return s;
}

}  // namespace

OpCheck exhaustive_op(const std::string& op, fp::Precision p, gad::DepthPolicy policy) {
  const bool unary = op == "floor" || op == "exp" || op == "sqrt";
  if (std::find(op_names().begin(), op_names().end(), op) == op_names().end()) {
    throw ConfigError("field 'op': unknown gadget '" + op + "'");
  }
  net::Circuit c;
  Builder b(c, policy);
  const Bundle x = gad::input_bundle(b, p);
  const Bundle y = unary ? x : gad::input_bundle(b, p);
  std::vector<gad::Wire> outs;
  if (op == "add") outs = gad::g_add(b, x, y).bits;
  if (op == "sub") outs = gad::g_sub(b, x, y).bits;
  if (op == "mul") outs = gad::g_mul(b, x, y).bits;
  if (op == "div") outs = gad::g_div(b, x, y).bits;
  if (op == "floor") outs = gad::g_floor(b, x).bits;
  if (op == "exp") outs = gad::g_exp(b, x).bits;
  if (op == "sqrt") outs = gad::g_sqrt(b, x).value.bits;
  if (op == "compare") {
    const auto cw = gad::g_compare(b, x, y);
    outs = {cw.lt, cw.gt};
  }
  c.set_outputs(outs);

  // Expected output bits per case, or nullopt when the case is skipped.
  std::function<std::optional<std::vector<std::uint8_t>>(const FpNum&, const FpNum&)> expect =
      [&](const FpNum& a, const FpNum& d) -> std::optional<std::vector<std::uint8_t>> {
    if (op == "add") return gad::encode_bits(fp::fp_add(a, d));
    if (op == "sub") return gad::encode_bits(fp::fp_sub(a, d));
    if (op == "mul") return gad::encode_bits(fp::fp_mul(a, d));
    if (op == "div") {
      if (d.is_zero()) return std::nullopt;
      return gad::encode_bits(fp::fp_div(a, d));
    }
    if (op == "floor") return gad::encode_bits(fp::fp_floor(a));
    if (op == "exp") return gad::encode_bits(fp::fp_exp(a).value);
    if (op == "sqrt") {
      if (a.is_negative()) return std::nullopt;
      return gad::encode_bits(fp::fp_sqrt(a));
    }
    const auto o = fp::fp_compare(a, d);
    return std::vector<std::uint8_t>{o == fp::Ordering::Less ? std::uint8_t{1} : std::uint8_t{0},
                                     o == fp::Ordering::Greater ? std::uint8_t{1} : std::uint8_t{0}};
  };

  const auto all = fp::enumerate_all(p);
  OpCheck r{op, 0, 0, 0, 0, std::nullopt};
  std::vector<std::pair<FpNum, FpNum>> batch;
  std::vector<std::vector<std::uint8_t>> want;
  auto flush = [&] {
    std::vector<std::uint64_t> in(c.inputs().size(), 0);
    for (std::size_t l = 0; l < batch.size(); ++l) {
      auto bits = gad::encode_bits(batch[l].first);
      if (!unary) {
        const auto yb = gad::encode_bits(batch[l].second);
        bits.insert(bits.end(), yb.begin(), yb.end());
      }
      for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) in[i] |= std::uint64_t{1} << l;
      }
    }
    const auto res = net::evaluate_batch(c, in);
    for (std::size_t l = 0; l < batch.size(); ++l) {
      bool ok = true;
      for (std::size_t o = 0; o < res.size(); ++o) ok = ok && (((res[o] >> l) & 1) == want[l][o]);
      if (ok) {
        ++r.passed;
      } else {
        ++r.failed;
        if (!r.counterexample) {
          std::vector<FpNum> ops{batch[l].first};
          if (!unary) ops.push_back(batch[l].second);
          std::string s = "inputs " + batch[l].first.str();
          if (!unary) s += ", " + batch[l].second.str();
          r.counterexample = s + " (bits " + bits_of(ops) + ")";
        }
      }
    }
    batch.clear();
    want.clear();
  };
  for (const auto& a : all) {
    for (const auto& d : all) {
      if (unary && !(d == all.front())) break;
      ++r.cases;
      const auto w = expect(a, d);
      if (!w) {
        ++r.skipped;
        continue;
      }
      batch.emplace_back(a, d);
      want.push_back(*w);
      if (batch.size() == 64) flush();
    }
  }
  if (!batch.empty()) flush();
  return r;
}

}  // namespace tcvar::harness
