#include <doctest.h>

#include <random>
#include <set>

#include "gadget_rig.hpp"
#include "tcvar/error.hpp"
#include "tcvar/gadgets/constants.hpp"
#include "tcvar/fp/ops.hpp"

using namespace tcvar;
using gad::Builder;
using gad::Bundle;
using gad::DepthPolicy;
using gad::Word;
using fp::FpNum;
using fp::Precision;

namespace {

std::vector<std::uint8_t> to_bits(std::uint64_t v, std::size_t w) {
  std::vector<std::uint8_t> r(w);
  for (std::size_t i = 0; i < w; ++i) r[i] = (v >> i) & 1;
  return r;
}

std::uint64_t from_bits(const std::vector<std::uint8_t>& bits, std::size_t off, std::size_t w) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < w; ++i) v |= std::uint64_t{bits[off + i]} << i;
  return v;
}

// Integer circuit over two unsigned words; outputs are concatenated words.
template <class F>
rig::Rig int_rig(std::size_t wa, std::size_t wb, F build, DepthPolicy pol = DepthPolicy::Strict) {
  rig::Rig r;
  Builder b(r.circuit, pol);
  const Word a = b.inputs(wa), c = b.inputs(wb);
  std::vector<net::GateId> outs;
  for (const Word& w : build(b, a, c)) outs.insert(outs.end(), w.begin(), w.end());
  r.circuit.set_outputs(outs);
  r.n_inputs = wa + wb;
  return r;
}

std::vector<std::vector<std::uint8_t>> all_pairs(std::size_t wa, std::size_t wb) {
  std::vector<std::vector<std::uint8_t>> rows;
  for (std::uint64_t x = 0; x < (1u << wa); ++x) {
    for (std::uint64_t y = 0; y < (1u << wb); ++y) {
      auto r = to_bits(x, wa);
      auto s = to_bits(y, wb);
      r.insert(r.end(), s.begin(), s.end());
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace

TEST_CASE("word adders match integer addition under both policies") {
  for (auto pol : {DepthPolicy::Strict, DepthPolicy::Tree}) {
    for (std::size_t w : {1u, 3u, 5u, 9u}) {
      const std::size_t wa = std::min<std::size_t>(w, 6), wb = std::min<std::size_t>(w, 5);
      auto r = int_rig(wa, wb, [&](Builder& b, const Word& a, const Word& c) {
        auto s = b.add_carry(b.zero_extend(a, w), b.zero_extend(c, w), b.zero());
        auto s1 = b.add_carry(b.zero_extend(a, w), b.zero_extend(c, w), b.one());
        return std::vector<Word>{s.sum, {s.carry}, s1.sum, {s1.carry}};
      }, pol);
      const auto rows = all_pairs(wa, wb);
      const auto out = r.run(rows);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto x = from_bits(rows[k], 0, wa), y = from_bits(rows[k], wa, wb);
        CHECK(from_bits(out[k], 0, w + 1) == x + y);
        CHECK(from_bits(out[k], w + 1, w + 1) == x + y + 1);
      }
    }
  }
}

TEST_CASE("carry-lookahead depth does not grow with width") {
  for (std::size_t w : {4u, 16u, 64u, 200u, 700u}) {
    net::Circuit c;
    Builder b(c);
    auto s = b.add_carry(b.inputs(w), b.inputs(w), b.input());
    const auto d = b.max_level(s.sum);
    CHECK(d <= 10);
  }
}

TEST_CASE("negate, multiply, constant multiply and comparisons") {
  const std::size_t wa = 5, wb = 4;
  auto r = int_rig(wa, wb, [&](Builder& b, const Word& a, const Word& c) {
    std::vector<Word> o;
    o.push_back(b.mul(a, c));                                 // 9 bits
    o.push_back(b.mul_const(a, 11));                          // 5+4 bits
    o.push_back(b.negate_if(a, c[0]));                        // 5 bits
    o.push_back({b.ge_const(a, 13), b.eq_const(a, 7), b.greater(a, b.zero_extend(c, wa))});
    o.push_back(b.encode_onehot(b.leading_one(a), 3));
    const auto dec = b.decode(c);
    o.push_back(Word(dec.begin(), dec.end()));                // 16 bits
    o.push_back(b.add_rows({a, b.zero_extend(c, wa), a, a}, 8));
    o.push_back(b.add_rows({a, b.zero_extend(c, wa), a, a}, 8, 3));
    return o;
  });
  const auto rows = all_pairs(wa, wb);
  const auto out = r.run(rows);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto x = from_bits(rows[k], 0, wa), y = from_bits(rows[k], wa, wb);
    std::size_t off = 0;
    auto take = [&](std::size_t w) {
      auto v = from_bits(out[k], off, w);
      off += w;
      return v;
    };
    CHECK(take(9) == x * y);
    CHECK(take(9) == x * 11);
    CHECK(take(5) == ((y & 1) ? ((32 - x) & 31) : x));
    CHECK(take(1) == (x >= 13));
    CHECK(take(1) == (x == 7));
    CHECK(take(1) == (x > y));
    std::uint64_t lead = 0;
    for (std::uint64_t t = x; t > 1; t >>= 1) ++lead;
    CHECK(take(3) == lead);
    CHECK(take(16) == (std::uint64_t{1} << y));
    CHECK(take(8) == ((3 * x + y) & 255));
    CHECK(take(8) == ((3 * x + y) & 255));
  }
}

TEST_CASE("fixed-round column sums land on one level for every height") {
  std::set<std::uint32_t> levels;
  for (std::size_t h : {3u, 10u, 40u, 200u}) {
    net::Circuit c;
    Builder b(c);
    std::vector<std::vector<gad::Wire>> cols(12);
    for (auto& col : cols) col = b.inputs(h);
    levels.insert(b.max_level(b.add_columns(cols, 20, 4)));
  }
  CHECK(levels.size() == 1);
}

TEST_CASE("constant folding only fires when every input is constant") {
  net::Circuit c;
  Builder b(c);
  CHECK(b.and_({b.one(), b.zero()}) == b.zero());
  CHECK(b.or_({b.one(), b.zero()}) == b.one());
  CHECK(b.not_(b.zero()) == b.one());
  const auto x = b.input();
  const auto g = b.and_({x, b.one()});
  CHECK(g != x);
  CHECK(b.level(g) == 1);
  CHECK(b.level(b.buffer(g)) == 2);
}

// ---------------------------------------------------------------------------
// Floating-point gadgets against the reference arithmetic.

namespace {

std::vector<std::vector<FpNum>> all_pairs_fp(Precision p) {
  const auto vals = fp::enumerate_all(p);
  std::vector<std::vector<FpNum>> s;
  for (const auto& a : vals) {
    for (const auto& c : vals) s.push_back({a, c});
  }
  return s;
}

FpNum random_fp(std::mt19937_64& g, Precision p, int emin, int emax) {
  const std::int64_t lo = std::int64_t{1} << (p.bits() - 1);
  std::uniform_int_distribution<std::int64_t> m(lo, 2 * lo - 1);
  std::uniform_int_distribution<int> e(emin, emax), coin(0, 9);
  if (coin(g) == 0) return FpNum::zero(p);
  const auto mm = m(g);
  return FpNum(coin(g) < 5 ? -mm : mm, e(g), p);
}

}  // namespace

TEST_CASE("binary gadgets are bit-exact on every p=3 pair") {
  const Precision p(3);
  const auto samples = all_pairs_fp(p);
  auto r = rig::make_fp(p, 2, [](Builder& b, const std::vector<Bundle>& in) {
    std::vector<Bundle> o{gad::g_add(b, in[0], in[1]), gad::g_sub(b, in[0], in[1]), gad::g_mul(b, in[0], in[1]),
                          gad::g_div(b, in[0], in[1]), gad::g_floor(b, in[0])};
    return o;
  });
  const auto out = rig::run_fp(r, p, samples);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& a = samples[k][0];
    const auto& c = samples[k][1];
    CAPTURE(a.str());
    CAPTURE(c.str());
    CHECK(out[k][0] == fp::fp_add(a, c));
    CHECK(out[k][1] == fp::fp_sub(a, c));
    CHECK(out[k][2] == fp::fp_mul(a, c));
    if (!c.is_zero()) CHECK(out[k][3] == fp::fp_div(a, c));
    CHECK(out[k][4] == fp::fp_floor(a));
  }
}

TEST_CASE("compare gadget orders every p=3 pair") {
  const Precision p(3);
  const auto samples = all_pairs_fp(p);
  rig::Rig r;
  gad::Builder b(r.circuit);
  const auto x = gad::input_bundle(b, p), y = gad::input_bundle(b, p);
  const auto cmp = gad::g_compare(b, x, y);
  r.circuit.set_outputs({cmp.lt, cmp.gt});
  r.n_inputs = r.circuit.inputs().size();
  std::vector<std::vector<std::uint8_t>> rows;
  for (const auto& s : samples) {
    auto bits = gad::encode_bits(s[0]);
    const auto t = gad::encode_bits(s[1]);
    bits.insert(bits.end(), t.begin(), t.end());
    rows.push_back(bits);
  }
  const auto out = r.run(rows);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto ord = fp::fp_compare(samples[k][0], samples[k][1]);
    CHECK(out[k][0] == (ord == fp::Ordering::Less));
    CHECK(out[k][1] == (ord == fp::Ordering::Greater));
  }
}

TEST_CASE("binary gadgets on random wider operands") {
  for (int bits : {4, 6, 8}) {
    const Precision p(bits);
    std::mt19937_64 g(77 + bits);
    std::vector<std::vector<FpNum>> samples;
    const int lim = static_cast<int>(p.max_exponent());
    for (int i = 0; i < 1024; ++i) {
      // Mix full-range and near-unit exponents so ties, overflow and flush all occur.
      const int span = i % 2 ? lim : bits + 1;
      samples.push_back({random_fp(g, p, -span - 1, span), random_fp(g, p, -span - 1, span)});
    }
    auto r = rig::make_fp(p, 2, [](Builder& b, const std::vector<Bundle>& in) {
      return std::vector<Bundle>{gad::g_add(b, in[0], in[1]), gad::g_mul(b, in[0], in[1]),
                                 gad::g_div(b, in[0], in[1]), gad::g_floor(b, in[0]),
                                 gad::g_sub(b, in[0], in[1])};
    });
    const auto out = rig::run_fp(r, p, samples);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const auto& a = samples[k][0];
      const auto& c = samples[k][1];
      CAPTURE(a.str());
      CAPTURE(c.str());
      CHECK(out[k][0] == fp::fp_add(a, c));
      CHECK(out[k][1] == fp::fp_mul(a, c));
      if (!c.is_zero()) CHECK(out[k][2] == fp::fp_div(a, c));
      CHECK(out[k][3] == fp::fp_floor(a));
      CHECK(out[k][4] == fp::fp_sub(a, c));
    }
  }
}

TEST_CASE("iterated addition matches the exact reference for n up to 32") {
  const Precision p(4);
  std::mt19937_64 g(4242);
  for (std::size_t n = 1; n <= 32; ++n) {
    std::vector<std::vector<FpNum>> samples;
    for (int i = 0; i < 200; ++i) {
      std::vector<FpNum> xs;
      const int lim = i % 3 == 0 ? 15 : 4;
      for (std::size_t j = 0; j < n; ++j) xs.push_back(random_fp(g, p, -lim - 1, lim));
      if (i % 5 == 0 && n >= 2) xs[1] = xs[0].negated();  // exact cancellation
      samples.push_back(xs);
    }
    auto r = rig::make_fp(p, n, [](Builder& b, const std::vector<Bundle>& in) {
      return std::vector<Bundle>{gad::g_iter_add(b, in)};
    });
    const auto out = rig::run_fp(r, p, samples);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      CAPTURE(n);
      CAPTURE(k);
      CHECK(out[k][0] == fp::fp_iter_add(samples[k]));
    }
  }
}

TEST_CASE("iterated addition depth is the same for every n >= 2") {
  for (int bits : {3, 6}) {
    const Precision p(bits);
    std::set<std::uint32_t> depths;
    for (std::size_t n : {2u, 3u, 5u, 8u, 17u, 33u, 64u}) {
      net::Circuit c({.dedup = false, .metrics_only = true});
      Builder b(c);
      std::vector<Bundle> xs;
      for (std::size_t i = 0; i < n; ++i) xs.push_back(gad::input_bundle(b, p));
      depths.insert(b.max_level(gad::g_iter_add(b, xs).bits));
    }
    CHECK(depths.size() == 1);
  }
}

TEST_CASE("iterated product: STRICT refuses more than two factors, TREE computes them") {
  const Precision p(4);
  {
    net::Circuit c;
    Builder b(c, DepthPolicy::Strict);
    std::vector<Bundle> xs{gad::input_bundle(b, p), gad::input_bundle(b, p), gad::input_bundle(b, p)};
    CHECK_THROWS_AS(gad::g_iter_mul(b, xs), StrictPolicyViolation);
  }
  std::mt19937_64 g(9);
  for (std::size_t n : {3u, 4u, 7u}) {
    std::vector<std::vector<FpNum>> samples;
    for (int i = 0; i < 192; ++i) {
      std::vector<FpNum> xs;
      for (std::size_t j = 0; j < n; ++j) xs.push_back(random_fp(g, p, i % 2 ? -16 : -5, i % 2 ? 15 : 3));
      samples.push_back(xs);
    }
    auto r = rig::make_fp(p, n, [](Builder& b, const std::vector<Bundle>& in) {
      return std::vector<Bundle>{gad::g_iter_mul(b, in)};
    }, DepthPolicy::Tree);
    const auto out = rig::run_fp(r, p, samples);
    for (std::size_t k = 0; k < samples.size(); ++k) CHECK(out[k][0] == fp::fp_iter_mul(samples[k]));
  }
}

TEST_CASE("matmul gadget and policy equivalence on the shared fragment") {
  const Precision p(4);
  std::mt19937_64 g(5);
  std::vector<std::vector<FpNum>> samples;
  for (int i = 0; i < 128; ++i) {
    std::vector<FpNum> xs;
    for (int j = 0; j < 12; ++j) xs.push_back(random_fp(g, p, -6, 4));
    samples.push_back(xs);
  }
  std::vector<std::vector<std::vector<FpNum>>> outs;
  for (auto pol : {DepthPolicy::Strict, DepthPolicy::Tree}) {
    auto r = rig::make_fp(p, 12, [](Builder& b, const std::vector<Bundle>& in) {
      gad::BundleMatrix A{{in[0], in[1], in[2]}, {in[3], in[4], in[5]}};
      gad::BundleMatrix B{{in[6], in[7]}, {in[8], in[9]}, {in[10], in[11]}};
      std::vector<Bundle> o;
      for (auto& row : gad::g_matmul(b, A, B)) o.insert(o.end(), row.begin(), row.end());
      return o;
    }, pol);
    outs.push_back(rig::run_fp(r, p, samples));
  }
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        std::vector<FpNum> terms;
        for (int t = 0; t < 3; ++t) terms.push_back(fp::fp_mul(s[3 * i + t], s[6 + 2 * t + j]));
        CHECK(outs[0][k][2 * i + j] == fp::fp_iter_add(terms));
      }
    }
  }
  CHECK(outs[0] == outs[1]);
}

TEST_CASE("gadgets reject operands of different precisions") {
  net::Circuit c;
  Builder b(c);
  const auto x = gad::input_bundle(b, Precision(3));
  const auto y = gad::input_bundle(b, Precision(4));
  CHECK_THROWS_AS(gad::g_add(b, x, y), PrecisionMismatch);
  CHECK_THROWS_AS(gad::g_mul(b, x, y), PrecisionMismatch);
  CHECK_THROWS_AS(gad::g_compare(b, x, y), PrecisionMismatch);
}

TEST_CASE("measured constants are deterministic, positive and n-independent") {
  for (auto pol : {DepthPolicy::Strict, DepthPolicy::Tree}) {
    const auto a = gad::measure_constants(Precision(4), pol);
    const auto b = gad::measure_constants(Precision(4), pol);
    CHECK(a.d_std == b.d_std);
    CHECK(a.d_add == b.d_add);
    CHECK(a.d_exp == b.d_exp);
    CHECK(a.d_add == a.d_add_n64);
    for (auto d : {a.d_std, a.d_add, a.d_mul, a.d_exp, a.d_sqrt}) CHECK(d >= 1);
    for (std::size_t i = 0; i < a.gadgets.size(); ++i) {
      CHECK(a.gadgets[i].size == b.gadgets[i].size);
      CHECK(a.gadgets[i].depth == b.gadgets[i].depth);
    }
  }
}

TEST_CASE("compare is irreflexive on identical wires") {
  const Precision p(4);
  rig::Rig r;
  Builder b(r.circuit);
  const auto x = gad::input_bundle(b, p);
  const auto cw = gad::g_compare(b, x, x);
  r.circuit.set_outputs({cw.lt, cw.gt});
  r.n_inputs = r.circuit.inputs().size();
  std::vector<std::vector<std::uint8_t>> rows;
  for (const auto& v : fp::enumerate_all(p)) rows.push_back(gad::encode_bits(v));
  for (const auto& o : r.run(rows)) {
    CHECK(o[0] == 0);
    CHECK(o[1] == 0);
  }
}

TEST_CASE("matmul by the identity returns the matrix") {
  const Precision p(4);
  std::mt19937_64 g(55);
  std::vector<std::vector<FpNum>> samples;
  for (int i = 0; i < 256; ++i) {
    std::vector<FpNum> xs;
    for (int j = 0; j < 4; ++j) xs.push_back(random_fp(g, p, -16, 15));
    samples.push_back(xs);
  }
  auto r = rig::make_fp(p, 4, [p](Builder& b, const std::vector<Bundle>& in) {
    const auto one = gad::const_bundle(b, FpNum::one(p));
    const auto zero = gad::const_bundle(b, FpNum::zero(p));
    gad::BundleMatrix A{{in[0], in[1]}, {in[2], in[3]}};
    gad::BundleMatrix I{{one, zero}, {zero, one}};
    std::vector<Bundle> o;
    for (auto& row : gad::g_matmul(b, A, I)) o.insert(o.end(), row.begin(), row.end());
    return o;
  });
  const auto out = rig::run_fp(r, p, samples);
  for (std::size_t k = 0; k < samples.size(); ++k) CHECK(out[k] == samples[k]);
}

TEST_CASE("iterated product of [2, 2, 2] is 8 under TREE") {
  const Precision p(4);
  auto r = rig::make_fp(p, 3, [](Builder& b, const std::vector<Bundle>& in) {
    return std::vector<Bundle>{gad::g_iter_mul(b, in)};
  }, DepthPolicy::Tree);
  const FpNum two = fp::round_rational(2, 1, p).value;
  const auto out = rig::run_fp(r, p, {{two, two, two}});
  CHECK(out[0][0] == fp::round_rational(8, 1, p).value);
}
