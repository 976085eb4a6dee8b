#include "tcvar/compiler/compile.hpp"

#include <random>

#include "tcvar/error.hpp"
#include "tcvar/fp/encoding.hpp"
#include "tcvar/netlist/ops.hpp"
#include "tcvar/var/fp_backend.hpp"
#include "tcvar/var/model.hpp"

namespace tcvar::cc {

using Value = GateBackend::Value;

namespace {

void emit(GateBackend& be, const std::vector<Value>& vals, std::vector<gad::Wire>& outs) {
  for (const auto& v : vals) {
    const auto bd = be.bundle(v);
    outs.insert(outs.end(), bd.bits.begin(), bd.bits.end());
  }
}

template <class F>
Fragment make_fragment(Precision p, gad::DepthPolicy policy, gad::TransImpl impl, const gad::GadgetConstants& k,
                       std::size_t n_in, F&& body) {
  net::Circuit c;
  gad::Builder b(c, policy);
  GateBackend be(b, p, impl, k, false);
  std::vector<Value> ins;
  for (std::size_t i = 0; i < n_in; ++i) ins.push_back(gad::input_bundle(b, p));
  std::vector<gad::Wire> outs;
  emit(be, body(be, ins), outs);
  c.set_outputs(outs);
  Fragment f{std::move(c), be.rows().empty() ? LayerRow{} : be.rows().front()};
  return f;
}

var::Mat<Value> as_mat(const std::vector<Value>& v, std::size_t r, std::size_t c) { return var::Mat<Value>{r, c, v}; }

}  // namespace

CompiledModel compile_model(const var::ModelConfig& cfg, const CompileOptions& opts) {
  var::validate(cfg);
  return compile_model(cfg, gad::measure_constants(Precision(cfg.p), cfg.policy, cfg.transcendental), opts);
}

CompiledModel compile_model(const var::ModelConfig& cfg, const gad::GadgetConstants& constants,
                            const CompileOptions& opts) {
  var::validate(cfg);
  const Precision p(cfg.p);
  CompiledModel m{cfg, var::make_weights(cfg),
                  net::Circuit({.dedup = !opts.metrics_only, .metrics_only = opts.metrics_only, .max_gates = opts.max_gates}),
                  {}};
  std::vector<gad::Wire> outs;
  {
    gad::Builder b(m.circuit, cfg.policy);
    GateBackend be(b, p, cfg.transcendental, constants, opts.align);
    var::Mat<Value> X0{1, cfg.d, {}};
    for (std::size_t i = 0; i < cfg.d; ++i) X0.a.push_back(gad::input_bundle(b, p));

    if (cfg.phase2_input == var::Phase2Input::Indices) {
      std::vector<std::vector<gad::Wire>> onehot;
      for (const auto& s : cfg.scales) {
        for (std::size_t pos = 0; pos < s.h * s.w; ++pos) {
          std::vector<gad::Wire> w;
          for (std::size_t r = 0; r < cfg.c_vae; ++r) w.push_back(b.input());
          onehot.push_back(std::move(w));
        }
      }
      const auto& C = m.weights.codebook;
      std::vector<std::vector<FpNum>> columns(C.cols);
      for (std::size_t q = 0; q < C.cols; ++q) {
        for (std::size_t r = 0; r < C.rows; ++r) columns[q].push_back(C.at(r, q));
      }
      var::TokenSequence<Value> emb;
      std::size_t pos = 0;
      for (std::size_t k = 0; k < cfg.scales.size(); ++k) {
        const auto s = cfg.scales[k];
        var::Map<Value> e{s.h, s.w, C.cols, {}};
        be.begin_layer("P2.scale[" + std::to_string(k) + "].lookup", LayerKind::Lookup);
        for (std::size_t i = 0; i < s.h * s.w; ++i, ++pos) {
          for (std::size_t q = 0; q < C.cols; ++q) e.a.push_back(be.select(onehot[pos], columns[q]));
        }
        e.a = be.end_layer(std::move(e.a));
        emb.push_back(std::move(e));
      }
      const auto r = var::run_pipeline(be, cfg, m.weights, X0, &emb);
      emit(be, r.image.a, outs);
      for (const auto& t : r.tokens) emit(be, t.a, outs);
    } else {
      const auto r = var::run_pipeline(be, cfg, m.weights, X0);
      emit(be, r.image.a, outs);
    }
    m.circuit.set_outputs(outs);
    m.report.layers = be.rows();
  }
  m.circuit = net::lower_thresholds(m.circuit);

  m.report.constants = constants;
  auto& t = m.report.totals;
  t.depth = m.circuit.depth();
  t.size = m.circuit.size();
  t.raw_size = m.circuit.raw_size();
  t.n = cfg.tokens();
  t.p = cfg.p;
  t.policy = cfg.policy;
  t.inputs = m.circuit.inputs().size();
  t.outputs = m.circuit.outputs().size();
  return m;
}

std::vector<std::uint8_t> input_bits(const var::ModelConfig& cfg, const ModelInput& in) {
  if (in.x0.size() != cfg.d) throw ShapeMismatch("X0 needs d entries");
  std::vector<std::uint8_t> bits;
  for (const auto& x : in.x0) {
    const auto e = gad::encode_bits(x);
    bits.insert(bits.end(), e.begin(), e.end());
  }
  if (cfg.phase2_input == var::Phase2Input::Indices) {
    if (in.indices.size() != cfg.scales.size()) throw ShapeMismatch("one index map per scale");
    for (std::size_t k = 0; k < cfg.scales.size(); ++k) {
      if (in.indices[k].size() != cfg.scales[k].h * cfg.scales[k].w) throw ShapeMismatch("index map size differs from h*w");
      for (std::size_t idx : in.indices[k]) {
        if (idx >= cfg.c_vae) throw IndexOutOfRange("token index outside the codebook");
        for (std::size_t r = 0; r < cfg.c_vae; ++r) bits.push_back(r == idx ? 1 : 0);
      }
    }
  }
  return bits;
}

std::vector<FpNum> reference_outputs(const var::ModelConfig& cfg, const var::ModelWeights& w, const ModelInput& in) {
  const Precision p(cfg.p);
  var::FpBackend be(p);
  const var::Mat<FpNum> X0{1, cfg.d, in.x0};
  std::vector<FpNum> out;
  if (cfg.phase2_input == var::Phase2Input::Indices) {
    var::TokenSequence<FpNum> emb;
    for (std::size_t k = 0; k < cfg.scales.size(); ++k) {
      emb.push_back(var::codebook_lookup(in.indices.at(k), cfg.scales[k].h, cfg.scales[k].w, w.codebook));
    }
    const auto r = var::run_pipeline(be, cfg, w, X0, &emb);
    out = r.image.a;
    for (const auto& t : r.tokens) out.insert(out.end(), t.a.begin(), t.a.end());
  } else {
    out = var::run_pipeline(be, cfg, w, X0).image.a;
  }
  return out;
}

ModelInput random_input(const var::ModelConfig& cfg, std::uint64_t seed, std::uint64_t trial) {
  std::mt19937_64 g(seed * 0x9E3779B97F4A7C15ull + trial);
  const Precision p(cfg.p);
  ModelInput in;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < cfg.d; ++i) in.x0.push_back(fp::from_double(u(g), p));
  if (cfg.phase2_input == var::Phase2Input::Indices) {
    std::uniform_int_distribution<std::size_t> pick(0, cfg.c_vae - 1);
    for (const auto& s : cfg.scales) {
      std::vector<std::size_t> idx;
      for (std::size_t k = 0; k < s.h * s.w; ++k) idx.push_back(pick(g));
      in.indices.push_back(std::move(idx));
    }
  }
  return in;
}

std::vector<std::vector<FpNum>> evaluate_values(const net::Circuit& c, Precision p,
                                                const std::vector<std::vector<std::uint8_t>>& rows) {
  const std::size_t width = fp::EncodingLayout(p).width();
  std::vector<std::vector<FpNum>> out;
  for (std::size_t base = 0; base < rows.size(); base += 64) {
    const std::size_t lanes = std::min<std::size_t>(64, rows.size() - base);
    std::vector<std::uint64_t> in(c.inputs().size(), 0);
    for (std::size_t l = 0; l < lanes; ++l) {
      if (rows[base + l].size() != in.size()) throw ArityMismatch("assignment width differs from the input count");
      for (std::size_t i = 0; i < in.size(); ++i) {
        if (rows[base + l][i]) in[i] |= std::uint64_t{1} << l;
      }
    }
    const auto res = net::evaluate_batch(c, in);
    for (std::size_t l = 0; l < lanes; ++l) {
      std::vector<FpNum> vals;
      std::vector<std::uint8_t> bits(width);
      for (std::size_t o = 0; o + width <= res.size(); o += width) {
        for (std::size_t j = 0; j < width; ++j) bits[j] = (res[o + j] >> l) & 1;
        vals.push_back(gad::decode_bits(p, bits));
      }
      out.push_back(std::move(vals));
    }
  }
  return out;
}

VerifyResult verify_model(const CompiledModel& m, const net::Circuit& c, std::uint64_t trials, std::uint64_t seed) {
  VerifyResult res;
  const Precision p(m.cfg.p);
  std::vector<std::uint64_t> ids;
  std::vector<std::vector<std::uint8_t>> rows;
  std::vector<std::vector<FpNum>> expected;
  auto flush = [&] {
    const auto got = evaluate_values(c, p, rows);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (got[k] == expected[k]) {
        ++res.passed;
        continue;
      }
      ++res.failed;
      if (!res.counterexample) {
        Counterexample ce{ids[k], {}, expected[k], got[k], 0};
        for (auto bit : rows[k]) ce.input_bits.push_back(bit ? '1' : '0');
        while (ce.first_diff < std::min(ce.expected.size(), ce.actual.size()) &&
               ce.expected[ce.first_diff] == ce.actual[ce.first_diff]) {
          ++ce.first_diff;
        }
        res.counterexample = std::move(ce);
      }
    }
    ids.clear();
    rows.clear();
    expected.clear();
  };
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto in = random_input(m.cfg, seed, t);
    try {
      expected.push_back(reference_outputs(m.cfg, m.weights, in));
    } catch (const RowSumZero&) {
      ++res.skipped;
      continue;
    }
    rows.push_back(input_bits(m.cfg, in));
    ids.push_back(t);
    if (rows.size() == 64) flush();
  }
  if (!rows.empty()) flush();
  return res;
}

net::Circuit inject_fault(const net::Circuit& c, net::GateId id) {
  if (id >= c.size()) throw IndexOutOfRange("gate id " + std::to_string(id) + " outside the circuit");
  net::Circuit out(c.options());
  std::vector<net::GateId> map(c.size());
  std::vector<net::GateId> ins;
  for (net::GateId g = 0; g < c.size(); ++g) {
    const auto k = c.kind(g);
    if (k == net::GateKind::Input) {
      map[g] = out.add_input();
    } else if (k == net::GateKind::Const0 || k == net::GateKind::Const1) {
      const bool v = k == net::GateKind::Const1;
      map[g] = out.add_const(g == id ? !v : v);
      continue;
    } else {
      ins.clear();
      for (auto f : c.fanin(g)) ins.push_back(map[f]);
      map[g] = out.add_gate(k, ins, k == net::GateKind::Threshold ? c.threshold(g) : 0);
    }
    if (g == id) map[g] = out.add_gate(net::GateKind::Not, {map[g]});
  }
  std::vector<net::GateId> outs;
  for (auto o : c.outputs()) outs.push_back(map[o]);
  out.set_outputs(outs);
  return out;
}

std::optional<net::GateId> live_constant(const net::Circuit& c) {
  std::vector<char> live(c.size(), 0);
  for (auto o : c.outputs()) live[o] = 1;
  for (net::GateId g = static_cast<net::GateId>(c.size()); g-- > 0;) {
    if (!live[g]) continue;
    for (auto f : c.fanin(g)) live[f] = 1;
  }
  for (net::GateId g = 0; g < c.size(); ++g) {
    const auto k = c.kind(g);
    if (live[g] && (k == net::GateKind::Const0 || k == net::GateKind::Const1)) return g;
  }
  return std::nullopt;
}

Fragment compile_up_interpolation(Precision p, gad::DepthPolicy policy, const gad::GadgetConstants& k, std::size_t h,
                                  std::size_t w, std::size_t c, std::size_t h2, std::size_t w2) {
  return make_fragment(p, policy, gad::TransImpl::Auto, k, h * w * c, [&](GateBackend& be, const std::vector<Value>& in) {
    return var::up_interpolate(be, var::Map<Value>{h, w, c, in}, h2, w2).a;
  });
}

Fragment compile_attention(Precision p, gad::DepthPolicy policy, gad::TransImpl impl, const gad::GadgetConstants& k,
                           std::size_t n, const var::Mat<FpNum>& Wq, const var::Mat<FpNum>& Wk,
                           const var::Mat<FpNum>& Wv) {
  return make_fragment(p, policy, impl, k, n * Wq.rows, [&](GateBackend& be, const std::vector<Value>& in) {
    return var::attention_layer(be, as_mat(in, n, Wq.rows), Wq, Wk, Wv).a;
  });
}

Fragment compile_mlp(Precision p, gad::DepthPolicy policy, const gad::GadgetConstants& k, std::size_t n,
                     const var::Mat<FpNum>& W, const std::vector<FpNum>& b) {
  return make_fragment(p, policy, gad::TransImpl::Auto, k, n * W.cols, [&](GateBackend& be, const std::vector<Value>& in) {
    return var::mlp(be, as_mat(in, n, W.cols), W, b).a;
  });
}

Fragment compile_layernorm(Precision p, gad::DepthPolicy policy, gad::TransImpl impl, const gad::GadgetConstants& k,
                           std::size_t n, std::size_t d) {
  return make_fragment(p, policy, impl, k, n * d, [&](GateBackend& be, const std::vector<Value>& in) {
    return var::layer_norm(be, as_mat(in, n, d)).a;
  });
}

Fragment compile_conv(Precision p, gad::DepthPolicy policy, const gad::GadgetConstants& k, std::size_t h,
                      std::size_t w, std::size_t c, const std::vector<var::ConvKernel>& kernels) {
  return make_fragment(p, policy, gad::TransImpl::Auto, k, h * w * c, [&](GateBackend& be, const std::vector<Value>& in) {
    return var::conv2d(be, var::Map<Value>{h, w, c, in}, kernels).a;
  });
}

}  // namespace tcvar::cc
