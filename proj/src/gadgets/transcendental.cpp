#include "tcvar/gadgets/transcendental.hpp"

#include <functional>

#include "tcvar/error.hpp"
#include "tcvar/fp/encoding.hpp"
#include "tcvar/fp/transcendental.hpp"

namespace tcvar::gad {

const char* to_string(TransImpl t) {
  switch (t) {
    case TransImpl::Auto: return "auto";
    case TransImpl::Series: return "series";
    case TransImpl::Table: return "table";
  }
  return "?";
}

std::optional<TransImpl> parse_trans_impl(std::string_view s) {
  if (s == "auto") return TransImpl::Auto;
  if (s == "series") return TransImpl::Series;
  if (s == "table") return TransImpl::Table;
  return std::nullopt;
}

TransImpl resolve(TransImpl t, Precision p) {
  if (t != TransImpl::Auto) return t;
  return p.bits() <= kTableMaxPrecision ? TransImpl::Table : TransImpl::Series;
}

namespace {

// Bits [lo, lo + width) of w, zero beyond its end.
Word slice(const Builder& b, const Word& w, std::size_t lo, std::size_t width) {
  Word out(width, b.zero());
  for (std::size_t i = 0; i < width && lo + i < w.size(); ++i) out[i] = w[lo + i];
  return out;
}

Bundle mux_bundle(Builder& b, Wire sel, const Bundle& x, const Bundle& y) {
  Bundle out{x.p, {}};
  for (std::size_t i = 0; i < x.bits.size(); ++i) out.bits.push_back(b.mux(sel, x.bits[i], y.bits[i]));
  return out;
}

// Sum of minterms over every valid encoding, one OR per output bit.
Bundle table_gadget(Builder& b, const Bundle& x, const std::function<FpNum(const FpNum&)>& f) {
  const std::size_t w = x.bits.size();
  std::vector<Wire> neg(w);
  for (std::size_t i = 0; i < w; ++i) neg[i] = b.not_(x.bits[i]);
  std::vector<std::vector<Wire>> ones(w);
  std::vector<Wire> lits(w);
  for (const FpNum& v : fp::enumerate_all(x.p)) {
    const auto in = fp::encode(v);
    const auto out = fp::encode(f(v));
    for (std::size_t i = 0; i < w; ++i) lits[i] = in[i] ? x.bits[i] : neg[i];
    const Wire mt = b.and_(lits);
    for (std::size_t i = 0; i < w; ++i) {
      if (out[i]) ones[i].push_back(mt);
    }
  }
  Bundle res{x.p, {}};
  for (auto& o : ones) res.bits.push_back(b.or_(o));
  return res;
}

// |x| as a fixed-point integer floor(|x| * 2^F), for exponents up to 1.
Word fixed_point(Builder& b, const FpWires& w, int p, int F) {
  const auto onehot = b.decode(w.exp);  // index = exponent bits read unsigned
  const std::size_t n = onehot.size();
  const auto width = static_cast<std::size_t>(p + 1 + F);
  Word X(width);
  std::vector<Wire> terms;
  for (std::size_t j = 0; j < width; ++j) {
    terms.clear();
    for (std::size_t code = 0; code < n; ++code) {
      const auto e = static_cast<std::int64_t>(code >= n / 2 ? code - n : code);
      if (e > 1) continue;
      const std::int64_t src = static_cast<std::int64_t>(j) - e - F;
      if (src >= 0 && src < p) terms.push_back(b.and_({onehot[code], w.mag[static_cast<std::size_t>(src)]}));
    }
    X[j] = b.or_(terms);
  }
  return X;
}

Bundle exp_series(Builder& b, const Bundle& x) {
  const auto ep = fp::ExpParams::for_precision(x.p);
  const int p = ep.p, F = ep.frac_bits, G = ep.inv_ln2_bits, guard = ep.guard_bits;
  const auto Fu = static_cast<std::size_t>(F);
  const FpWires w = unpack(x);

  // Range reduction: k = round(X / ln2), R = X - k ln2 with guard bits.
  const Word X = fixed_point(b, w, p, F);
  const auto kg = static_cast<std::size_t>(F + G);
  const Word Xi = b.mul_const(X, ep.inv_ln2);
  const Word Xr = b.add(Xi, b.const_word(fp::BigInt(1) << (kg - 1), Xi.size()), Xi.size() + 1);
  const auto kw = static_cast<std::size_t>(p + 4);
  const Word k = slice(b, Xr, kg, kw - 1);  // non-negative, p+3 bits suffice
  const std::size_t tw = X.size() + static_cast<std::size_t>(guard) + 2;
  const Word kl = b.mul_const(k, ep.ln2);
  const Word T = b.add(Builder::shift_left(X, static_cast<std::size_t>(guard), b.zero()), b.not_word(b.zero_extend(kl, tw)), tw, b.one());
  // floor(T / 2^guard) keeps the two's complement sign; |R| < 2^F.
  const Word R = slice(b, T, static_cast<std::size_t>(guard), Fu + 2);
  const Wire r_neg_raw = T[tw - 1];
  Word R_fixed = R;
  R_fixed[Fu + 1] = r_neg_raw;
  const Word Rmag = slice(b, b.negate_if(R_fixed, r_neg_raw), 0, Fu + 1);
  const Wire r_neg = b.xor_(r_neg_raw, w.sign);
  const Word ksigned = b.negate_if(Builder::zero_extend(k, kw, b.zero()), w.sign);

  // Horner in sign-magnitude: t = floor(acc R / 2^F); acc = 2^F + floor(t recip_j / 2^F).
  const fp::BigInt one = fp::BigInt(1) << F;
  const Word ceil_pad = b.and_word(b.const_word(one - 1, Fu), r_neg);
  Word acc;
  for (int j = ep.degree; j >= 1; --j) {
    Word tmag;
    if (j == ep.degree) {
      tmag = Rmag;  // acc = 2^F exactly
    } else {
      Word P = b.mul(acc, Rmag);
      P = b.add(P, ceil_pad, P.size() + 1);
      tmag = slice(b, P, Fu, Fu + 2);
    }
    Word U = b.mul_const(tmag, ep.recip[static_cast<std::size_t>(j)]);
    U = b.add(U, ceil_pad, U.size() + 1);
    const Word v = slice(b, U, Fu, Fu + 2);
    acc = b.add(b.const_word(one, Fu + 2), b.xor_word(v, r_neg), Fu + 2, r_neg);
  }
  const Word E = Builder::sign_extend(ksigned, kw + 1);
  Bundle rounded = round_pack(b, x.p, b.zero(), acc, &E, -F).value;

  // e >= 2: saturate or flush by sign; zero input gives exactly 1.
  Word biased = w.exp;
  biased.back() = b.not_(biased.back());
  const Wire big = b.ge_const(biased, (fp::BigInt(1) << p) + 2);
  const Bundle sat = mux_bundle(b, w.sign, const_bundle(b, FpNum::zero(x.p)), const_bundle(b, FpNum::max_magnitude(x.p)));
  rounded = mux_bundle(b, big, sat, rounded);
  return mux_bundle(b, w.zero, const_bundle(b, FpNum::one(x.p)), rounded);
}

Bundle sqrt_series(Builder& b, const Bundle& x) {
  const auto sp = fp::SqrtParams::for_precision(x.p);
  const int p = sp.p, F = sp.frac_bits;
  const auto Fu = static_cast<std::size_t>(F);
  const FpWires w = unpack(x);
  const auto P = static_cast<std::size_t>(p);

  // Make e + p - 1 even by doubling the significand.
  const Wire odd = (p - 1) % 2 ? b.not_(w.exp[0]) : w.exp[0];
  const Word m_even = b.zero_extend(w.mag, P + 1);
  const Word m_odd = Builder::shift_left(b.zero_extend(w.mag, P), 1, b.zero());
  const Word m2 = b.mux_word(odd, m_odd, m_even);
  const std::size_t ew = w.exp.size() + 2;
  const Word e2 = b.add(Builder::sign_extend(w.exp, ew), b.and_word(b.const_word(-1, ew), odd), ew);

  const Word y = Builder::shift_left(m2, Fu - P + 1, b.zero());  // F+2 bits
  const auto top = b.decode(slice(b, y, Fu - 1, 3));
  const std::size_t zw = Fu + 2;
  Word z(zw);
  for (std::size_t bit = 0; bit < zw; ++bit) {
    std::vector<Wire> terms;
    for (std::size_t idx = 0; idx < sp.seeds.size(); ++idx) {
      if (boost::multiprecision::bit_test(sp.seeds[idx], static_cast<unsigned>(bit))) terms.push_back(top[idx + 2]);
    }
    z[bit] = b.or_(terms);
  }
  const Word three = b.const_word(fp::BigInt(3) << F, Fu + 3);
  for (int i = 0; i < sp.iterations; ++i) {
    const Word t = slice(b, b.mul(z, z), Fu, Fu + 2);
    const Word u = slice(b, b.mul(y, t), Fu, Fu + 3);
    const Word d = b.add(three, b.not_word(u), Fu + 3, b.one());
    z = slice(b, b.mul(z, d), Fu + 1, zw);
  }
  const Word s = slice(b, b.mul(y, z), Fu, Fu + 3);
  // (e2 + p - 1) / 2, exact.
  const Word h = b.add(e2, b.const_word(p - 1, ew), ew);
  const Word half(h.begin() + 1, h.end());
  return round_pack(b, x.p, b.zero(), s, &half, -F).value;
}

}  // namespace

Bundle g_exp(Builder& b, const Bundle& x, TransImpl impl) {
  unpack(x);  // width check
  Bundle out = resolve(impl, x.p) == TransImpl::Table
                   ? table_gadget(b, x, [](const FpNum& v) { return fp::fp_exp(v).value; })
                   : exp_series(b, x);
  label_gadget(b, out, "exp");
  return out;
}

SqrtWires g_sqrt(Builder& b, const Bundle& x, TransImpl impl) {
  const FpWires w = unpack(x);
  Bundle out = resolve(impl, x.p) == TransImpl::Table
                   ? table_gadget(b, x, [](const FpNum& v) {
                       return v.is_negative() ? FpNum::zero(v.precision()) : fp::fp_sqrt(v);
                     })
                   : mux_bundle(b, w.sign, const_bundle(b, FpNum::zero(x.p)), sqrt_series(b, x));
  label_gadget(b, out, "sqrt");
  return {out, w.sign};
}

}  // namespace tcvar::gad
