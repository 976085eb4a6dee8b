// One line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "bridge.hpp"
#include "gadget_rig.hpp"
#include "oracle.hpp"
#include "tcvar/compiler/compile.hpp"
#include "tcvar/fp/ops.hpp"
#include "tcvar/fp/transcendental.hpp"
#include "tcvar/gadgets/constants.hpp"
#include "tcvar/gadgets/transcendental.hpp"
#include "tcvar/harness/harness.hpp"
#include "tcvar/netlist/ops.hpp"
#include "tcvar/var/fp_backend.hpp"
#include "tcvar/var/model.hpp"
#include "tcvar/var/weights.hpp"

using namespace tcvar;
using bridge::Rng;
using fp::FpNum;
using fp::Precision;
using gad::DepthPolicy;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) note << "FAILED: " << what << "; ";
    pass = pass && ok;
  }
};

FpNum random_fp(std::mt19937_64& rng, Precision p, std::int64_t elo, std::int64_t ehi) {
  std::uniform_int_distribution<std::int64_t> md(p.min_significand(), p.max_significand());
  std::uniform_int_distribution<std::int64_t> ed(std::max(elo, p.min_exponent()), std::min(ehi, p.max_exponent()));
  const std::int64_t m = md(rng);
  return FpNum(std::bernoulli_distribution(0.5)(rng) ? -m : m, ed(rng), p);
}

var::ModelConfig toy(int bits) {
  auto cfg = var::load_config(TCVAR_SOURCE_DIR "/configs/scan_base.json");
  cfg.p = bits;
  return cfg;
}

void gadget_faithfulness(Outcome& o) {
  std::uint64_t cases = 0;
  for (const char* op : {"add", "mul", "div", "compare"}) {
    const auto r = harness::exhaustive_op(op, Precision(3));
    cases += r.cases;
    o.require(r.failed == 0, std::string(op) + " " + r.counterexample.value_or(""));
  }
  o.note << cases << " p=3 cases across add/mul/div/compare";
}

void iterated_addition(Outcome& o) {
  const Precision p(4);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    std::vector<FpNum> xs;
    const int n = std::uniform_int_distribution<int>(1, 32)(rng);
    for (int k = 0; k < n; ++k) xs.push_back(random_fp(rng, p, -8, 4));
    const FpNum want = fp::fp_iter_add(xs);
    std::shuffle(xs.begin(), xs.end(), rng);
    o.require(fp::fp_iter_add(xs) == want, "permutation changed an iterated sum");
  }
  for (std::size_t n : {2u, 4u, 8u, 16u, 32u}) {
    const auto rig = rig::make_fp(p, n, [](gad::Builder& b, const std::vector<gad::Bundle>& in) {
      return std::vector<gad::Bundle>{gad::g_iter_add(b, in)};
    });
    std::vector<std::vector<FpNum>> samples;
    for (int i = 0; i < 200; ++i) {
      samples.push_back({});
      for (std::size_t k = 0; k < n; ++k) samples.back().push_back(random_fp(rng, p, -8, 4));
    }
    const auto got = rig::run_fp(rig, p, samples);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      o.require(got[i][0] == fp::fp_iter_add(samples[i]), "circuit sum differs at n=" + std::to_string(n));
    }
  }
  o.note << "1000 shuffled lists, 200 circuit samples per n in {2,4,8,16,32}";
}

void transcendental_bounds(Outcome& o) {
  std::mt19937_64 rng(2025);
  for (int bits : {6, 8, 10}) {
    const Precision p(bits);
    const oracle::Wide bound = boost::multiprecision::ldexp(oracle::Wide(1), -bits);
    oracle::Wide worst = 0;
    int flagged = 0;
    for (int i = 0; i < 10000; ++i) {
      const FpNum x = (i % 4 == 0) ? random_fp(rng, p, p.min_exponent(), p.max_exponent()) : random_fp(rng, p, -bits - 6, 1);
      const auto r = fp::fp_exp(x);
      if (r.flagged()) {
        ++flagged;
        continue;
      }
      const oracle::Wide want = boost::multiprecision::exp(oracle::wide(x));
      worst = std::max(worst, oracle::Wide(boost::multiprecision::abs(oracle::wide(r.value) - want) / want));
    }
    for (int i = 0; i < 10000; ++i) {
      const FpNum x = random_fp(rng, p, p.min_exponent(), p.max_exponent()).abs();
      const oracle::Wide want = boost::multiprecision::sqrt(oracle::wide(x));
      worst = std::max(worst, oracle::Wide(boost::multiprecision::abs(oracle::wide(fp::fp_sqrt(x)) - want) / want));
    }
    o.require(worst <= bound, "relative error above 2^-p at p=" + std::to_string(bits));
    o.note << "p=" << bits << " worst*2^p=" << static_cast<double>(worst * (oracle::Wide(1) / bound)) << " ("
           << flagged << " flagged exp skipped); ";
  }
  const Precision p(6);
  for (auto impl : {gad::TransImpl::Auto, gad::TransImpl::Series}) {
    const auto rig = rig::make_fp(p, 1, [impl](gad::Builder& b, const std::vector<gad::Bundle>& in) {
      return std::vector<gad::Bundle>{gad::g_exp(b, in[0], impl), gad::g_sqrt(b, in[0], impl).value};
    });
    std::vector<std::vector<FpNum>> samples;
    for (int i = 0; i < 500; ++i) samples.push_back({random_fp(rng, p, p.min_exponent(), p.max_exponent()).abs()});
    const auto got = rig::run_fp(rig, p, samples);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      o.require(got[i][0] == fp::fp_exp(samples[i][0]).value, "exp gadget differs");
      o.require(got[i][1] == fp::fp_sqrt(samples[i][0]), "sqrt gadget differs");
    }
  }
  o.note << "500 gadget samples at p=6, auto and series";
}

std::vector<harness::ScanPoint> n_scan;

void depth_independence(Outcome& o) {
  harness::ScanOptions so;
  so.max_gates = 400'000'000;
  std::set<std::uint32_t> depth, att;
  for (std::size_t n : {2u, 5u, 21u, 85u}) {
    n_scan.push_back(harness::scan_point(toy(4), "n", n, so));
    depth.insert(n_scan.back().depth);
    att.insert(n_scan.back().attention_depth);
    o.require(n_scan.back().n == n, "scan produced the wrong token count");
  }
  o.require(depth.size() == 1, "pipeline depth varies with n");
  o.require(att.size() == 1, "attention depth varies with n");
  o.note << "n in {2,5,21,85}: pipeline depth " << *depth.begin() << ", attention depth " << *att.begin();
}

void size_polynomial(Outcome& o) {
  std::vector<double> x, y;
  for (const auto& pt : n_scan) {
    x.push_back(static_cast<double>(pt.n));
    y.push_back(static_cast<double>(pt.size));
  }
  o.require(x.size() == 4, "n scan incomplete");
  const auto f = harness::loglog_fit(x, y);
  o.require(f.slope <= 3.5, "slope above 3.5");
  o.require(f.r2 >= 0.98, "R^2 below 0.98");
  o.note << "slope " << f.slope << ", R^2 " << f.r2;
}

std::map<int, cc::CompiledModel> compiled;

const cc::CompiledModel& model(int bits) {
  auto it = compiled.find(bits);
  if (it == compiled.end()) it = compiled.emplace(bits, cc::compile_model(toy(bits))).first;
  return it->second;
}

void layer_bounds(Outcome& o) {
  for (int bits : {4, 8}) {
    const auto& m = model(bits);
    const auto fresh = gad::measure_constants(Precision(bits), DepthPolicy::Strict, m.cfg.transcendental);
    const auto& c = m.report.constants;
    o.require(c.d_std == fresh.d_std && c.d_add == fresh.d_add && c.d_exp == fresh.d_exp && c.d_sqrt == fresh.d_sqrt,
              "report constants differ from a fresh measurement");
    const auto v = cc::check_bounds(m.report);
    o.require(cc::all_pass(v), "a layer exceeds its bound at p=" + std::to_string(bits));
    std::set<var::LayerKind> kinds;
    for (const auto& row : m.report.layers) kinds.insert(row.kind);
    for (auto k : {var::LayerKind::Attention, var::LayerKind::Mlp, var::LayerKind::LayerNorm, var::LayerKind::UpInterpolation}) {
      o.require(kinds.count(k) == 1, "a bounded layer kind is missing from the report");
    }
    o.note << "p=" << bits << ": " << v.size() << " rows within bound; ";
  }
}

void end_to_end(Outcome& o) {
  for (int bits : {4, 8}) {
    const auto& m = model(bits);
    const auto r = cc::verify_model(m, m.circuit, 25, 7);
    o.require(r.passed == 25 && r.failed == 0, "mismatch at p=" + std::to_string(bits));
    o.note << "p=" << bits << " " << r.passed << "/25; ";
  }
  const auto& m = model(4);
  const auto id = cc::live_constant(m.circuit);
  o.require(id.has_value(), "no constant gate to corrupt");
  if (id) {
    const auto r = cc::verify_model(m, cc::inject_fault(m.circuit, *id), 25, 7);
    o.require(r.failed > 0 && r.counterexample.has_value(), "fault injection went unnoticed");
    o.note << "fault at gate " << *id << " caught in " << r.failed << " trials";
  }
}

template <class Got, class Want>
void same(Outcome& o, const Got& got, const Want& want, const char* what) {
  o.require(got == want, std::string(what) + " differs from the straight-line reference");
}

void reference_validity(Outcome& o) {
  using namespace var;
  const Precision p(6);
  FpBackend be(p);
  Rng r(99);
  for (int t = 0; t < 20; ++t) {
    const auto X = r.map(2, 3, 2, p);
    same(o, bridge::g3(up_interpolate(be, X, 4, 5)), brute::upsample(bridge::g3(X), 4, 5, p), "upsampling");
    const auto S = r.mat(3, 2, p), Wq = r.mat(2, 2, p), Wk = r.mat(2, 2, p), Wv = r.mat(2, 2, p);
    same(o, bridge::g2(attention_layer(be, S, Wq, Wk, Wv)),
         brute::attention(bridge::g2(S), bridge::g2(Wq), bridge::g2(Wk), bridge::g2(Wv)), "attention");
    const std::vector<FpNum> b{r.val(p), r.val(p)};
    same(o, bridge::g2(mlp(be, S, Wq, b)), brute::mlp(bridge::g2(S), bridge::g2(Wq), b), "mlp");
    same(o, bridge::g2(layer_norm(be, S)), brute::layer_norm(bridge::g2(S)), "layer norm");
    const std::vector<ConvKernel> ks{r.kernel(2, 2, 2, p), r.kernel(2, 2, 2, p)};
    same(o, bridge::g3(conv2d(be, X, ks)), brute::conv(bridge::g3(X), bridge::bks(ks)), "convolution");
    o.require(up_interpolate(be, X, 2, 3).a == X.a, "identity scaling changed the map");
  }
  const auto cfg = load_config(TCVAR_SOURCE_DIR "/configs/identity.json");
  const auto wts = make_weights(cfg);
  const Precision pi(cfg.p);
  FpBackend bi(pi);
  for (int t = 0; t < 50; ++t) {
    const auto X0 = r.mat(1, cfg.d, pi);
    const auto res = run_pipeline(bi, cfg, wts, X0);
    o.require(res.image.a == X0.a, "identity pipeline changed its input");
  }
  o.note << "20 randomized rounds per op at p=6; identity pipeline on 50 inputs";
}

void determinism(Outcome& o) {
  const auto a = cc::compile_model(toy(4));
  const auto b = cc::compile_model(toy(4));
  o.require(net::serialize(a.circuit) == net::serialize(b.circuit), "netlists differ");
  o.require(cc::report_json(a.report) == cc::report_json(b.report), "JSON reports differ");
  o.require(cc::report_csv(a.report) == cc::report_csv(b.report), "CSV reports differ");
  o.note << "two compiles: identical netlist (" << net::serialize(a.circuit).size() << " bytes) and reports";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"gadget faithfulness (exhaustive p=3)", gadget_faithfulness},
      {"iterated addition single rounding", iterated_addition},
      {"exp/sqrt error bounds and gadget equality", transcendental_bounds},
      {"depth independent of n", depth_independence},
      {"size polynomial in n", size_polynomial},
      {"per-layer depth bounds", layer_bounds},
      {"end-to-end circuit equals reference", end_to_end},
      {"reference matches straight-line formulas", reference_validity},
      {"deterministic compilation", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu %s: %s  [%s] (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.note.str().c_str(), s);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
