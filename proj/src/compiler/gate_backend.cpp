#include "tcvar/compiler/gate_backend.hpp"

#include <algorithm>

#include "tcvar/fp/encoding.hpp"
#include "tcvar/fp/ops.hpp"
#include "tcvar/fp/transcendental.hpp"

namespace tcvar::cc {

namespace {

const FpNum* as_const(const GateBackend::Value& v) { return std::get_if<FpNum>(&v); }

}  // namespace

GateBackend::GateBackend(gad::Builder& b, Precision p, gad::TransImpl impl, const gad::GadgetConstants& constants,
                         bool align)
    : b_(b), p_(p), impl_(gad::resolve(impl, p)), k_(constants), align_(align) {}

gad::Bundle GateBackend::bundle(const Value& v) {
  if (const auto* c = as_const(v)) return gad::const_bundle(b_, *c);
  return std::get<gad::Bundle>(v);
}

void GateBackend::touch(const Value& v) {
  if (!in_layer_) return;
  const auto* bd = std::get_if<gad::Bundle>(&v);
  if (bd == nullptr) return;
  for (gad::Wire w : bd->bits) {
    if (w < region_start_) in_level_ = std::max(in_level_, b_.level(w));
  }
}

GateBackend::Value GateBackend::add(const Value& a, const Value& c) {
  if (as_const(a) && as_const(c)) return fp::fp_add(*as_const(a), *as_const(c));
  touch(a);
  touch(c);
  return gad::g_add(b_, bundle(a), bundle(c));
}

GateBackend::Value GateBackend::sub(const Value& a, const Value& c) {
  if (as_const(a) && as_const(c)) return fp::fp_sub(*as_const(a), *as_const(c));
  touch(a);
  touch(c);
  return gad::g_sub(b_, bundle(a), bundle(c));
}

GateBackend::Value GateBackend::mul(const Value& a, const Value& c) {
  if (as_const(a) && as_const(c)) return fp::fp_mul(*as_const(a), *as_const(c));
  touch(a);
  touch(c);
  return gad::g_mul(b_, bundle(a), bundle(c));
}

GateBackend::Value GateBackend::div(const Value& a, const Value& c) {
  if (as_const(a) && as_const(c)) return fp::fp_div(*as_const(a), *as_const(c));
  touch(a);
  touch(c);
  return gad::g_div(b_, bundle(a), bundle(c));
}

GateBackend::Value GateBackend::iter_add(const std::vector<Value>& xs) {
  if (std::all_of(xs.begin(), xs.end(), [](const Value& v) { return as_const(v) != nullptr; })) {
    std::vector<FpNum> v;
    for (const auto& x : xs) v.push_back(*as_const(x));
    return fp::fp_iter_add(v);
  }
  std::vector<gad::Bundle> bs;
  bs.reserve(xs.size());
  for (const auto& x : xs) {
    touch(x);
    bs.push_back(bundle(x));
  }
  return gad::g_iter_add(b_, bs);
}

GateBackend::Value GateBackend::exp(const Value& a) {
  if (const auto* c = as_const(a)) return fp::fp_exp(*c).value;
  touch(a);
  return gad::g_exp(b_, bundle(a), impl_);
}

GateBackend::Value GateBackend::sqrt(const Value& a) {
  if (const auto* c = as_const(a)) return fp::fp_sqrt(*c);
  touch(a);
  return gad::g_sqrt(b_, bundle(a), impl_).value;
}

GateBackend::Value GateBackend::guarded_div(const Value& g, const Value& a, const Value& c) {
  if (const auto* gc = as_const(g)) return gc->is_zero() ? Value(FpNum::zero(p_)) : div(a, c);
  touch(g);
  const Value q = div(a, c);
  const gad::Wire gz = gad::unpack(std::get<gad::Bundle>(g)).zero;
  const gad::Bundle zero = gad::const_bundle(b_, FpNum::zero(p_));
  gad::Bundle qb = bundle(q);
  for (std::size_t i = 0; i < qb.bits.size(); ++i) qb.bits[i] = b_.mux(gz, zero.bits[i], qb.bits[i]);
  return qb;
}

GateBackend::Value GateBackend::select(const std::vector<gad::Wire>& onehot, const std::vector<FpNum>& candidates) {
  const std::size_t width = fp::EncodingLayout(p_).width();
  std::vector<std::vector<std::uint8_t>> enc;
  for (const auto& c : candidates) enc.push_back(gad::encode_bits(c));
  gad::Bundle out{p_, {}};
  std::vector<gad::Wire> terms;
  for (std::size_t j = 0; j < width; ++j) {
    terms.clear();
    for (std::size_t r = 0; r < candidates.size(); ++r) {
      if (enc[r][j]) terms.push_back(onehot[r]);
    }
    out.bits.push_back(terms.empty() ? b_.zero() : b_.or_(terms));
  }
  touch(Value(gad::Bundle{p_, onehot}));
  return out;
}

void GateBackend::begin_layer(const std::string& name, LayerKind kind) {
  if (in_layer_) throw std::logic_error("layers do not nest");
  in_layer_ = true;
  row_ = LayerRow{name, kind, 0, 0, layer_bound(kind, k_)};
  region_start_ = static_cast<gad::Wire>(b_.circuit().size());
  in_level_ = 0;
  b_.circuit().begin_region();
}

std::vector<GateBackend::Value> GateBackend::end_layer(std::vector<Value> outs) {
  auto& c = b_.circuit();
  for (const auto& v : outs) touch(v);  // pass-through outputs count as inputs too
  row_.depth = c.region_depth();
  row_.size = c.region_size();
  c.end_region();
  in_layer_ = false;
  rows_.push_back(row_);
  if (align_) {
    const std::uint32_t target = in_level_ + std::max(row_.bound, row_.depth);
    for (auto& v : outs) {
      if (auto* bd = std::get_if<gad::Bundle>(&v)) bd->bits = b_.pad_to_level(bd->bits, target);
    }
  }
  return outs;
}

}  // namespace tcvar::cc
