#include "tcvar/gadgets/fp_gadgets.hpp"

#include <algorithm>
#include <map>

#include "tcvar/error.hpp"
#include "tcvar/fp/encoding.hpp"

namespace tcvar::gad {

namespace {

void require_same(const Bundle& x, const Bundle& y) {
  if (!(x.p == y.p)) throw PrecisionMismatch("gadget operands at different precisions");
  if (x.bits.size() != static_cast<std::size_t>(2 * x.p.bits() + 3) || y.bits.size() != x.bits.size()) {
    throw PrecisionMismatch("bundle width does not match its precision");
  }
}

int ceil_log2(std::size_t n) {
  int r = 0;
  while ((std::size_t{1} << r) < n) ++r;
  return r;
}

bool bit_of(std::int64_t v, std::size_t b) { return ((static_cast<std::uint64_t>(v) >> b) & 1) != 0; }

}  // namespace

FpWires unpack(const Bundle& bd) {
  const fp::EncodingLayout lay(bd.p);
  if (bd.bits.size() != lay.width()) throw PrecisionMismatch("bundle width does not match its precision");
  FpWires w;
  w.sign = bd.bits[lay.sign()];
  w.zero = bd.bits[lay.zero_flag()];
  for (int i = 0; i < lay.p; ++i) w.mag.push_back(bd.bits[lay.magnitude(i)]);
  for (int i = 0; i <= lay.p; ++i) w.exp.push_back(bd.bits[lay.exponent(i)]);
  return w;
}

Bundle pack(Precision p, const FpWires& w) {
  const fp::EncodingLayout lay(p);
  Bundle bd{p, std::vector<Wire>(lay.width())};
  bd.bits[lay.sign()] = w.sign;
  bd.bits[lay.zero_flag()] = w.zero;
  for (int i = 0; i < lay.p; ++i) bd.bits[lay.magnitude(i)] = w.mag[static_cast<std::size_t>(i)];
  for (int i = 0; i <= lay.p; ++i) bd.bits[lay.exponent(i)] = w.exp[static_cast<std::size_t>(i)];
  return bd;
}

Bundle input_bundle(Builder& b, Precision p) {
  return Bundle{p, b.inputs(fp::EncodingLayout(p).width())};
}

Bundle const_bundle(Builder& b, const FpNum& x) {
  const auto enc = fp::encode(x);
  Bundle bd{x.precision(), {}};
  for (std::size_t i = 0; i < enc.width(); ++i) bd.bits.push_back(b.constant(enc[i]));
  return bd;
}

std::vector<std::uint8_t> encode_bits(const FpNum& x) { return fp::encode(x).bits(); }

FpNum decode_bits(Precision p, std::span<const std::uint8_t> bits) {
  return fp::decode(fp::FpEncoding(p, std::vector<std::uint8_t>(bits.begin(), bits.end())));
}

void label_gadget(Builder& b, const Bundle& out, const std::string& name) {
  if (b.circuit().metrics_only() || out.bits.empty()) return;
  const int inst = b.circuit().next_instance(name);
  b.circuit().set_label(out.bits.front(), "gadget:" + name + ":" + std::to_string(inst));
}

Flagged round_pack(Builder& b, Precision prec, Wire sign, const Word& M, const Word* E, std::int64_t offset) {
  const int p = prec.bits();
  const std::size_t W = M.size();
  const auto P = static_cast<std::size_t>(p);
  const auto lead = b.leading_one(M);
  const Wire nonzero = b.or_(M);

  // Significand window, round bit and sticky for every leading position.
  Word sig(P);
  std::vector<Wire> terms;
  for (std::size_t j = 0; j < P; ++j) {
    terms.clear();
    for (std::size_t i = 0; i < W; ++i) {
      const auto src = static_cast<std::int64_t>(i) - p + 1 + static_cast<std::int64_t>(j);
      if (src >= 0) terms.push_back(b.and_({lead[i], M[static_cast<std::size_t>(src)]}));
    }
    sig[j] = b.or_(terms);
  }
  terms.clear();
  std::vector<Wire> sticky_terms;
  for (std::size_t i = P; i < W; ++i) {
    terms.push_back(b.and_({lead[i], M[i - P]}));
    if (i > P) {
      const Wire below = b.or_(std::span<const Wire>(M.data(), i - P));
      sticky_terms.push_back(b.and_({lead[i], below}));
    }
  }
  const Wire round_bit = b.or_(terms);
  const Wire sticky = b.or_(sticky_terms);
  const Wire up = b.and_({round_bit, b.or_({sticky, sig[0]})});

  // Increment the significand; a carry out renormalises to 100..0.
  Word res(P);
  std::vector<Wire> lits;
  for (std::size_t j = 0; j < P; ++j) {
    lits.assign({up});
    for (std::size_t q = 0; q < j; ++q) lits.push_back(sig[q]);
    res[j] = b.xor_(sig[j], b.and_(lits));
  }
  lits.assign({up});
  for (std::size_t q = 0; q < P; ++q) lits.push_back(sig[q]);
  const Wire cout = b.and_(lits);
  res[P - 1] = b.or_({res[P - 1], cout});
  const Wire ncout = b.not_(cout);

  const std::int64_t emin = prec.min_exponent(), emax = prec.max_exponent();
  FpWires out;
  Wire over, under;
  if (E == nullptr) {
    // Result exponent is a constant per (leading position, carry).
    std::vector<Wire> over_t, under_t, valid_t;
    std::vector<std::vector<Wire>> ebits(P + 1);
    for (std::size_t i = 0; i < W; ++i) {
      for (int c = 0; c < 2; ++c) {
        const std::int64_t ev = static_cast<std::int64_t>(i) + offset - (p - 1) + c;
        const Wire t = b.and_({lead[i], c ? cout : ncout});
        if (ev > emax) {
          over_t.push_back(t);
        } else if (ev < emin) {
          under_t.push_back(t);
        } else {
          valid_t.push_back(t);
          for (std::size_t bb = 0; bb <= P; ++bb) {
            if (bit_of(ev, bb)) ebits[bb].push_back(t);
          }
        }
      }
    }
    over = b.or_(over_t);
    under = b.or_(under_t);
    const Wire valid = b.or_(valid_t);
    const Wire not_under = b.not_(under);
    for (std::size_t j = 0; j < P; ++j) out.mag.push_back(b.or_({b.and_({res[j], not_under}), over}));
    for (std::size_t bb = 0; bb <= P; ++bb) {
      Wire e = b.or_(ebits[bb]);
      if (bit_of(emax, bb)) e = b.or_({e, over});
      out.exp.push_back(e);
    }
    out.zero = b.not_(b.or_({valid, over}));
  } else {
    // Variable base exponent: add the small per-position delta, then range check.
    std::vector<std::int64_t> deltas;
    std::vector<Wire> sel;
    for (std::size_t i = 0; i < W; ++i) {
      for (int c = 0; c < 2; ++c) {
        deltas.push_back(static_cast<std::int64_t>(i) + offset - (p - 1) + c);
        sel.push_back(b.and_({lead[i], c ? cout : ncout}));
      }
    }
    std::int64_t dmax = 0;
    for (auto d : deltas) dmax = std::max(dmax, d < 0 ? -d : d);
    const std::size_t we = std::max<std::size_t>(E->size(), static_cast<std::size_t>(ceil_log2(static_cast<std::size_t>(dmax) + 1) + 1)) + 2;
    Word delta(we);
    for (std::size_t bb = 0; bb < we; ++bb) {
      terms.clear();
      for (std::size_t k = 0; k < deltas.size(); ++k) {
        if (bit_of(deltas[k], bb)) terms.push_back(sel[k]);
      }
      delta[bb] = b.or_(terms);
    }
    const Word er = b.add(Builder::sign_extend(*E, we), delta, we);
    // Bias to unsigned for the range comparisons.
    Word biased = er;
    biased[we - 1] = b.not_(er[we - 1]);
    const BigInt bias = BigInt(1) << (we - 1);
    const Wire too_big = b.ge_const(biased, bias + emax + 1);
    const Wire too_small = b.not_(b.ge_const(biased, bias + emin));
    over = b.and_({too_big, nonzero});
    under = b.and_({too_small, nonzero});
    const Wire valid = b.and_({nonzero, b.not_(too_big), b.not_(too_small)});
    const Wire not_under = b.not_(under);
    for (std::size_t j = 0; j < P; ++j) out.mag.push_back(b.or_({b.and_({res[j], not_under}), over}));
    for (std::size_t bb = 0; bb <= P; ++bb) {
      Wire e = b.and_({er[bb], valid});
      if (bit_of(emax, bb)) e = b.or_({e, over});
      out.exp.push_back(e);
    }
    out.zero = b.not_(b.or_({valid, over}));
  }
  out.sign = b.and_({sign, b.not_(out.zero)});
  return Flagged{pack(prec, out), over, under};
}

namespace {

// Exponent word of an operand widened to `width` bits.
Word exp_word(const FpWires& w, std::size_t width) { return Builder::sign_extend(w.exp, width); }

}  // namespace

Flagged g_iter_add_flagged(Builder& b, std::span<const Bundle> xs, int rounds) {
  if (xs.empty()) throw EmptyInput("g_iter_add of an empty list");
  for (const auto& x : xs) require_same(xs.front(), x);
  const Precision prec = xs.front().p;
  if (xs.size() == 1) return Flagged{xs.front(), b.zero(), b.zero()};
  const int p = prec.bits();
  const std::size_t span = std::size_t{1} << (p + 1);            // exponent positions
  const std::size_t field_top = span + static_cast<std::size_t>(p) - 1;  // first column above every magnitude
  const std::size_t W = field_top + static_cast<std::size_t>(ceil_log2(xs.size())) + 2;

  std::vector<std::vector<Wire>> cols(W);
  for (const auto& x : xs) {
    const FpWires w = unpack(x);
    // e + 2^p: flip the exponent's sign bit.
    Word pos = w.exp;
    pos.back() = b.not_(pos.back());
    const auto onehot = b.decode(pos);
    std::vector<Wire> terms;
    for (std::size_t c = 0; c < W; ++c) {
      if (c >= field_top) {
        cols[c].push_back(w.sign);
        continue;
      }
      terms.clear();
      for (std::size_t k = 0; k < static_cast<std::size_t>(p); ++k) {
        if (c >= k && c - k < span) terms.push_back(b.and_({onehot[c - k], w.mag[k]}));
      }
      cols[c].push_back(b.xor_(b.or_(terms), w.sign));
    }
    cols[0].push_back(w.sign);
  }
  const Word acc = b.add_columns(std::move(cols), W, rounds);
  const Wire neg = acc[W - 1];
  Word mag = b.negate_if(acc, neg);
  mag.pop_back();
  return round_pack(b, prec, neg, mag, nullptr, -static_cast<std::int64_t>(span / 2));
}

Bundle g_iter_add(Builder& b, std::span<const Bundle> xs) {
  auto r = g_iter_add_flagged(b, xs).value;
  label_gadget(b, r, "iter_add");
  return r;
}

Bundle g_add(Builder& b, const Bundle& x, const Bundle& y) {
  require_same(x, y);
  const Bundle xs[] = {x, y};
  auto r = g_iter_add_flagged(b, xs, -1).value;
  label_gadget(b, r, "add");
  return r;
}

Bundle g_neg(Builder& b, const Bundle& x) {
  FpWires w = unpack(x);
  w.sign = b.and_({b.not_(w.sign), b.not_(w.zero)});
  return pack(x.p, w);
}

Bundle g_sub(Builder& b, const Bundle& x, const Bundle& y) { return g_add(b, x, g_neg(b, y)); }

Bundle g_mul(Builder& b, const Bundle& x, const Bundle& y) {
  require_same(x, y);
  const FpWires a = unpack(x), c = unpack(y);
  const std::size_t we = a.exp.size() + 1;
  const Word M = b.mul(a.mag, c.mag);
  const Word E = b.add(exp_word(a, we), exp_word(c, we), we);
  auto r = round_pack(b, x.p, b.xor_(a.sign, c.sign), M, &E, 0).value;
  label_gadget(b, r, "mul");
  return r;
}

Bundle g_div(Builder& b, const Bundle& x, const Bundle& y) {
  require_same(x, y);
  const FpWires a = unpack(x), c = unpack(y);
  const int p = x.p.bits();
  const auto frac = static_cast<std::size_t>(2 * p + 2);
  const std::size_t rw = static_cast<std::size_t>(p) + 1;
  const Word notD = b.not_word(b.zero_extend(c.mag, rw));
  Word r = b.zero_extend(a.mag, rw);
  Word Q(frac + 1, b.zero());
  for (std::size_t j = 0; j <= frac; ++j) {
    const auto diff = b.add_carry(r, notD, b.one());
    const Wire q = diff.carry;  // r >= divisor
    Q[frac - j] = q;
    r = b.mux_word(q, diff.sum, r);
    if (j < frac) {
      r = Builder::shift_left(r, 1, b.zero());
      r.pop_back();
    }
  }
  const std::size_t we = a.exp.size() + 1;
  const Word E = b.add(exp_word(a, we), b.not_word(exp_word(c, we)), we, b.one());
  auto out = round_pack(b, x.p, b.xor_(a.sign, c.sign), Q, &E, -static_cast<std::int64_t>(frac)).value;
  label_gadget(b, out, "div");
  return out;
}

CompareWires g_compare(Builder& b, const Bundle& x, const Bundle& y) {
  require_same(x, y);
  const FpWires a = unpack(x), c = unpack(y);
  // Order key of |value|: biased exponent above the significand; zero is all 0.
  auto key = [&](const FpWires& w) {
    Word k = w.mag;
    Word e = w.exp;
    e.back() = b.not_(e.back());
    for (Wire bit : e) k.push_back(b.and_({bit, b.not_(w.zero)}));
    return k;
  };
  const Word ka = key(a), kc = key(c);
  const Wire mag_gt = b.greater(ka, kc);
  const Wire mag_lt = b.greater(kc, ka);
  const Wire pa = b.not_(a.sign), pc = b.not_(c.sign);
  const Wire gt = b.or_({b.and_({pa, c.sign}), b.and_({pa, pc, mag_gt}), b.and_({a.sign, c.sign, mag_lt})});
  const Wire lt = b.or_({b.and_({a.sign, pc}), b.and_({pa, pc, mag_lt}), b.and_({a.sign, c.sign, mag_gt})});
  if (!b.circuit().metrics_only()) b.circuit().set_label(lt, "gadget:compare");
  return {lt, gt};
}

Bundle g_floor(Builder& b, const Bundle& x) {
  const FpWires w = unpack(x);
  const int p = x.p.bits();
  const auto P = static_cast<std::size_t>(p);
  const std::size_t ew = w.exp.size();
  const Wire nonneg_e = b.not_(w.exp.back());
  // sel[k]: exponent == -k for 1 <= k <= p-1.
  std::vector<Wire> sel(P, b.zero());
  std::vector<Wire> any_sel;
  for (std::size_t k = 1; k < P; ++k) {
    const BigInt code = (BigInt(1) << ew) - k;
    sel[k] = b.eq_const(w.exp, code);
    any_sel.push_back(sel[k]);
  }
  const Wire tiny = b.and_({w.exp.back(), b.not_(b.or_(any_sel))});  // e <= -p
  Word q(P);
  std::vector<Wire> terms;
  for (std::size_t j = 0; j < P; ++j) {
    terms.clear();
    for (std::size_t k = 1; k < P; ++k) {
      if (j + k < P) terms.push_back(b.and_({sel[k], w.mag[j + k]}));
    }
    q[j] = b.or_(terms);
  }
  terms.clear();
  for (std::size_t k = 1; k < P; ++k) terms.push_back(b.and_({sel[k], b.or_(std::span<const Wire>(w.mag.data(), k))}));
  terms.push_back(b.and_({tiny, b.not_(w.zero)}));
  const Wire frac = b.or_(terms);
  const Wire inc = b.and_({w.sign, frac});
  const Word q1 = b.add(q, Word{}, P + 1, inc);
  const Bundle rounded = round_pack(b, x.p, w.sign, q1, nullptr, 0).value;
  Bundle out{x.p, {}};
  for (std::size_t i = 0; i < x.bits.size(); ++i) out.bits.push_back(b.mux(nonneg_e, x.bits[i], rounded.bits[i]));
  label_gadget(b, out, "floor");
  return out;
}

Bundle g_iter_mul(Builder& b, std::span<const Bundle> xs) {
  if (xs.empty()) throw EmptyInput("g_iter_mul of an empty list");
  for (const auto& x : xs) require_same(xs.front(), x);
  if (xs.size() == 1) return xs.front();
  if (xs.size() == 2) return g_mul(b, xs[0], xs[1]);
  if (b.policy() == DepthPolicy::Strict) {
    throw StrictPolicyViolation("g_iter_mul over " + std::to_string(xs.size()) +
                                " operands needs the TREE policy");
  }
  std::vector<Word> mags;
  std::vector<Wire> signs;
  const std::size_t we = xs.front().p.bits() + 2 + static_cast<std::size_t>(ceil_log2(xs.size()));
  std::vector<Word> exps;
  for (const auto& x : xs) {
    const FpWires w = unpack(x);
    mags.push_back(w.mag);
    signs.push_back(w.sign);
    exps.push_back(exp_word(w, we));
  }
  while (mags.size() > 1) {
    std::vector<Word> next;
    std::vector<Wire> next_s;
    for (std::size_t i = 0; i + 1 < mags.size(); i += 2) {
      next.push_back(b.mul(mags[i], mags[i + 1]));
      next_s.push_back(b.xor_(signs[i], signs[i + 1]));
    }
    if (mags.size() % 2) {
      next.push_back(mags.back());
      next_s.push_back(signs.back());
    }
    mags.swap(next);
    signs.swap(next_s);
  }
  // Exponents sum in two's complement: add_rows works mod 2^we.
  const Word E = b.add_rows(exps, we);
  auto r = round_pack(b, xs.front().p, signs[0], mags[0], &E, 0).value;
  label_gadget(b, r, "iter_mul");
  return r;
}

BundleMatrix g_matmul(Builder& b, const BundleMatrix& A, const BundleMatrix& B) {
  if (A.empty() || B.empty()) throw ShapeMismatch("g_matmul of an empty matrix");
  const std::size_t n1 = A.size(), d = A[0].size(), n2 = B[0].size();
  if (B.size() != d) throw ShapeMismatch("g_matmul inner dimensions differ");
  for (const auto& row : A) {
    if (row.size() != d) throw ShapeMismatch("ragged left matrix");
  }
  for (const auto& row : B) {
    if (row.size() != n2) throw ShapeMismatch("ragged right matrix");
  }
  BundleMatrix out(n1, std::vector<Bundle>(n2, A[0][0]));
  std::vector<Bundle> terms;
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      terms.clear();
      for (std::size_t k = 0; k < d; ++k) terms.push_back(g_mul(b, A[i][k], B[k][j]));
      out[i][j] = g_iter_add(b, terms);
    }
  }
  return out;
}

}  // namespace tcvar::gad
