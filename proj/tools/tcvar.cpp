// tcvar: compile toy VAR models into threshold circuits, verify them against
// the p-bit reference, scan depth and size, print gadget constants.
//
// Exit codes: 0 ok, 1 usage, 2 config or other input error, 3 bound check
// failed, 4 circuit/reference mismatch, 5 depth varies along the n axis.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "tcvar/compiler/compile.hpp"
#include "tcvar/fp/encoding.hpp"
#include "tcvar/error.hpp"
#include "tcvar/harness/harness.hpp"
#include "tcvar/netlist/ops.hpp"

using namespace tcvar;

namespace {

enum Exit { kOk = 0, kUsage = 1, kConfig = 2, kBounds = 3, kMismatch = 4, kDepthVaries = 5 };

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_verdicts(const std::vector<cc::BoundVerdict>& v) {
  for (const auto& x : v) {
    if (!x.pass) std::cerr << "bound check failed: " << x.name << " depth " << x.depth << " > " << x.bound << "\n";
  }
}

struct CompileArgs {
  std::string config, netlist, report, csv;
  bool strict_bounds = false, metrics_only = false, no_align = false;
  std::vector<std::size_t> corrupt_rows;
};

int run_compile(const CompileArgs& a) {
  const auto cfg = var::load_config(a.config);
  if (a.metrics_only && !a.netlist.empty()) throw ConfigError("a metrics-only circuit cannot be written as a netlist");
  auto m = cc::compile_model(cfg, {.metrics_only = a.metrics_only, .align = !a.no_align, .max_gates = 0});
  for (std::size_t r : a.corrupt_rows) {
    if (r >= m.report.layers.size()) throw ConfigError("field 'corrupt-row': no layer row " + std::to_string(r));
    m.report.layers[r].depth += 1000;
  }
  if (!a.netlist.empty()) write_file(a.netlist, net::serialize(m.circuit));
  if (!a.report.empty()) write_file(a.report, cc::report_json(m.report));
  if (!a.csv.empty()) write_file(a.csv, cc::report_csv(m.report));
  const auto v = cc::check_bounds(m.report);
  std::cout << "depth " << m.report.totals.depth << " size " << m.report.totals.size << " n " << m.report.totals.n
            << " p " << m.report.totals.p << " layers " << v.size() << " bounds "
            << (cc::all_pass(v) ? "pass" : "FAIL") << "\n";
  print_verdicts(v);
  if (a.strict_bounds && !cc::all_pass(v)) return kBounds;
  return kOk;
}

int run_check(const std::string& path) {
  const auto j = nlohmann::json::parse(read_file(path));
  cc::DepthReport r;
  const auto& k = j.at("constants");
  r.constants.d_std = k.at("d_std");
  r.constants.d_add = k.at("d_add");
  r.constants.d_mul = k.at("d_mul");
  r.constants.d_exp = k.at("d_exp");
  r.constants.d_sqrt = k.at("d_sqrt");
  static const std::vector<var::LayerKind> kinds{var::LayerKind::UpInterpolation, var::LayerKind::Attention,
                                                 var::LayerKind::Mlp,             var::LayerKind::LayerNorm,
                                                 var::LayerKind::Conv,            var::LayerKind::Lookup,
                                                 var::LayerKind::Aggregate,       var::LayerKind::Residual};
  for (const auto& row : j.at("per_layer")) {
    cc::LayerRow l;
    l.name = row.at("name");
    const std::string kind = row.at("kind");
    bool found = false;
    for (auto kd : kinds) {
      if (kind == var::to_string(kd)) {
        l.kind = kd;
        found = true;
      }
    }
    if (!found) throw ConfigError("field 'per_layer.kind': unknown kind '" + kind + "'");
    l.depth = row.at("depth");
    r.layers.push_back(l);
  }
  const auto v = cc::check_bounds(r);
  print_verdicts(v);
  std::cout << v.size() << " rows, bounds " << (cc::all_pass(v) ? "pass" : "FAIL") << "\n";
  return cc::all_pass(v) ? kOk : kBounds;
}

struct VerifyArgs {
  std::string config;
  bool exhaustive_p3 = false;
  std::vector<std::string> ops;
  std::uint64_t trials = 25, seed = 1;
  std::string fault;  // gate id or "auto"
  std::string replay;
};

void dump_counterexample(const cc::Counterexample& ce) {
  std::cerr << "counterexample: trial " << ce.trial << "\n  input bits " << ce.input_bits << "\n  first differing output "
            << ce.first_diff << ": expected "
            << (ce.first_diff < ce.expected.size() ? ce.expected[ce.first_diff].str() : "-") << ", circuit "
            << (ce.first_diff < ce.actual.size() ? ce.actual[ce.first_diff].str() : "-") << "\n"
            << "  replay with: --replay " << ce.input_bits << "\n";
}

int run_verify(const VerifyArgs& a) {
  if (a.exhaustive_p3) {
    const auto ops = a.ops.empty() ? harness::op_names() : a.ops;
    bool ok = true;
    for (const auto& op : ops) {
      const auto r = harness::exhaustive_op(op, fp::Precision(3));
      std::cout << op << ": " << r.cases << " cases, " << r.passed << " pass, " << r.failed << " fail, " << r.skipped
                << " skipped\n";
      if (r.counterexample) std::cerr << "counterexample (" << op << "): " << *r.counterexample << "\n";
      ok = ok && r.failed == 0;
    }
    return ok ? kOk : kMismatch;
  }
  if (a.config.empty()) throw CLI::ValidationError("verify needs a config unless --exhaustive-p3 is given");
  const auto cfg = var::load_config(a.config);
  const auto m = cc::compile_model(cfg);
  net::Circuit faulty;
  const net::Circuit* c = &m.circuit;
  if (!a.fault.empty()) {
    net::GateId id = 0;
    if (a.fault == "auto") {
      const auto live = cc::live_constant(m.circuit);
      if (!live) throw ConfigError("field 'fault-inject': the circuit has no live constant");
      id = *live;
    } else {
      id = static_cast<net::GateId>(std::stoul(a.fault));
    }
    faulty = cc::inject_fault(m.circuit, id);
    c = &faulty;
    std::cerr << "fault injected at gate " << id << " (" << net::to_string(m.circuit.kind(id)) << ")\n";
  }
  if (!a.replay.empty()) {
    std::vector<std::uint8_t> bits;
    for (char ch : a.replay) {
      if (ch != '0' && ch != '1') throw ConfigError("field 'replay': expected a string of 0 and 1");
      bits.push_back(ch == '1');
    }
    // Decode the assignment back into a model input to get the reference.
    const fp::Precision p(cfg.p);
    const std::size_t w = fp::EncodingLayout(p).width();
    if (bits.size() != c->inputs().size()) throw ConfigError("field 'replay': wrong number of bits");
    cc::ModelInput in;
    for (std::size_t i = 0; i < cfg.d; ++i) in.x0.push_back(gad::decode_bits(p, std::span(bits.data() + i * w, w)));
    std::size_t off = cfg.d * w;
    if (cfg.phase2_input == var::Phase2Input::Indices) {
      for (const auto& s : cfg.scales) {
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < s.h * s.w; ++k, off += cfg.c_vae) {
          std::size_t hot = 0;
          while (hot < cfg.c_vae && !bits[off + hot]) ++hot;
          idx.push_back(hot);
        }
        in.indices.push_back(std::move(idx));
      }
    }
    const auto want = cc::reference_outputs(cfg, m.weights, in);
    const auto got = cc::evaluate_values(*c, p, {bits}).front();
    const bool ok = want == got;
    std::cout << "replay: " << (ok ? "pass" : "FAIL") << "\n";
    return ok ? kOk : kMismatch;
  }
  const auto r = cc::verify_model(m, *c, a.trials, a.seed);
  std::cout << "trials " << a.trials << " seed " << a.seed << ": " << r.passed << " pass, " << r.failed << " fail, "
            << r.skipped << " skipped (zero attention row sum)\n";
  if (r.counterexample) dump_counterexample(*r.counterexample);
  return r.failed == 0 ? kOk : kMismatch;
}

struct ScanArgs {
  std::string config, axis, out, plot;
  std::string values;
  bool no_assert = false, evaluate = false, no_times = false;
};

int run_scan(const ScanArgs& a) {
  std::vector<std::size_t> values;
  std::stringstream ss(a.values);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw CLI::ValidationError("--values expects a comma-separated list of positive integers");
    }
    values.push_back(std::stoull(item));
  }
  if (values.empty()) throw CLI::ValidationError("--values needs at least one value");
  const auto base = var::load_config(a.config);
  std::vector<harness::ScanPoint> pts;
  for (std::size_t v : values) {
    pts.push_back(harness::scan_point(base, a.axis, v, {.evaluate = a.evaluate, .max_gates = 0}));
    const auto& q = pts.back();
    std::cerr << a.axis << "=" << v << ": n " << q.n << " depth " << q.depth << " size " << q.size << "\n";
  }
  const std::string csv = harness::scan_csv(pts, !a.no_times);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    write_file(a.out, csv);
  }
  if (!a.plot.empty()) write_file(a.plot, harness::scan_svg(pts));
  if (a.axis == "n" && pts.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& q : pts) {
      x.push_back(static_cast<double>(q.n));
      y.push_back(static_cast<double>(q.size));
    }
    const auto f = harness::loglog_fit(x, y);
    std::cerr << "log-log size fit: slope " << f.slope << " r2 " << f.r2 << "\n";
    std::set<std::uint32_t> depths;
    for (const auto& q : pts) depths.insert(q.depth);
    if (depths.size() > 1 && !a.no_assert) {
      std::cerr << "depth varies along the n axis\n";
      return kDepthVaries;
    }
  }
  return kOk;
}

int run_constants(int p, const std::string& policy, const std::string& impl) {
  const auto pol = gad::parse_policy(policy);
  if (!pol) throw ConfigError("field 'policy': expected 'strict' or 'tree'");
  const auto ti = gad::parse_trans_impl(impl);
  if (!ti) throw ConfigError("field 'transcendental': expected 'auto', 'series' or 'table'");
  const auto k = gad::measure_constants(fp::Precision(p), *pol, *ti);
  std::printf("p=%d policy=%s transcendental=%s\n", k.p, gad::to_string(k.policy), gad::to_string(k.impl));
  std::printf("%-8s %6s\n", "constant", "depth");
  std::printf("%-8s %6u\n%-8s %6u\n%-8s %6u\n%-8s %6u\n%-8s %6u\n", "d_std", k.d_std, "d_add", k.d_add, "d_mul",
              k.d_mul, "d_exp", k.d_exp, "d_sqrt", k.d_sqrt);
  std::printf("\n%-16s %6s %10s\n", "gadget", "depth", "size");
  for (const auto& g : k.gadgets) {
    std::printf("%-16s %6u %10llu\n", g.name.c_str(), g.depth, static_cast<unsigned long long>(g.size));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile toy VAR models into threshold circuits and check them"};
  app.require_subcommand(1);

  CompileArgs ca;
  auto* compile = app.add_subcommand("compile", "compile a model config into a netlist and depth report");
  compile->add_option("config", ca.config, "model config (JSON)")->required();
  compile->add_option("-o,--output", ca.netlist, "netlist file");
  compile->add_option("--report", ca.report, "depth report (JSON)");
  compile->add_option("--csv", ca.csv, "per-layer CSV");
  compile->add_flag("--strict-bounds", ca.strict_bounds, "exit 3 when a layer exceeds its bound");
  compile->add_flag("--metrics-only", ca.metrics_only, "keep only depth and size (no netlist)");
  compile->add_flag("--no-align", ca.no_align, "skip buffering layer outputs to their bound");
  compile->add_option("--corrupt-row", ca.corrupt_rows, "add 1000 to a report row's depth (negative control)");

  std::string check_path;
  auto* check = app.add_subcommand("check", "re-check the bounds of a saved report");
  check->add_option("report", check_path, "report JSON")->required();

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "compare circuit outputs with the reference");
  verify->add_option("config", va.config, "model config (JSON)");
  verify->add_flag("--exhaustive-p3", va.exhaustive_p3, "every p=3 operand of single gadgets");
  verify->add_option("--op", va.ops, "gadget(s) for --exhaustive-p3")->check(CLI::IsMember(harness::op_names()));
  verify->add_option("--trials", va.trials, "random trials");
  verify->add_option("--seed", va.seed, "trial seed");
  verify->add_option("--fault-inject", va.fault, "invert gate <id>, or 'auto' for a live constant");
  verify->add_option("--replay", va.replay, "check one input assignment (bit string)");

  ScanArgs sa;
  auto* scan = app.add_subcommand("scan", "depth and size over token count or precision");
  scan->add_option("config", sa.config, "base config (JSON)")->required();
  scan->add_option("--axis", sa.axis, "n or p")->required()->check(CLI::IsMember({"n", "p"}));
  scan->add_option("--values", sa.values, "comma-separated axis values")->required();
  scan->add_option("-o,--output", sa.out, "CSV file (default stdout)");
  scan->add_option("--plot", sa.plot, "also write an SVG plot of size and depth");
  scan->add_flag("--no-assert", sa.no_assert, "do not fail when depth varies with n");
  scan->add_flag("--eval", sa.evaluate, "build full circuits and time one evaluation pass");
  scan->add_flag("--no-times", sa.no_times, "leave timing columns empty (byte-stable output)");

  int cp = 4;
  std::string cpol = "strict", cimpl = "auto";
  auto* constants = app.add_subcommand("constants", "measured gadget depths and sizes");
  constants->add_option("--p", cp, "precision")->required();
  constants->add_option("--policy", cpol, "strict or tree");
  constants->add_option("--transcendental", cimpl, "auto, series or table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*compile) return run_compile(ca);
    if (*check) return run_check(check_path);
    if (*verify) return run_verify(va);
    if (*scan) return run_scan(sa);
    if (*constants) return run_constants(cp, cpol, cimpl);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "malformed report: " << e.what() << "\n";
    return kConfig;
  }
  return kUsage;
}
