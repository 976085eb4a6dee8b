#include "tcvar/gadgets/builder.hpp"

#include <algorithm>
#include <stdexcept>

namespace tcvar::gad {

using net::GateKind;

namespace {
constexpr std::size_t kBlock = 8;
// Longest path through cla_strict above its inputs: generate/propagate,
// block terms, block carries, in-block carries, then a three-level xor.
constexpr std::uint32_t kClaDepth = 10;
}

const char* to_string(DepthPolicy p) { return p == DepthPolicy::Strict ? "strict" : "tree"; }

std::optional<DepthPolicy> parse_policy(std::string_view s) {
  if (s == "strict" || s == "STRICT") return DepthPolicy::Strict;
  if (s == "tree" || s == "TREE") return DepthPolicy::Tree;
  return std::nullopt;
}

Builder::Builder(net::Circuit& c, DepthPolicy policy)
    : c_(c), policy_(policy), zero_(c.add_const(false)), one_(c.add_const(true)) {}

Word Builder::inputs(std::size_t n) {
  Word w(n);
  for (auto& x : w) x = input();
  return w;
}

std::optional<bool> Builder::const_value(Wire w) const {
  if (w == zero_ || w == one_) return w == one_;
  const GateKind k = c_.kind(w);
  if (k == GateKind::Const0) return false;
  if (k == GateKind::Const1) return true;
  return std::nullopt;
}

Wire Builder::not_(Wire a) {
  if (auto v = const_value(a)) return constant(!*v);
  return c_.add_gate(GateKind::Not, {a});
}

Wire Builder::and_(std::span<const Wire> ins) {
  if (ins.empty()) return one_;
  if (ins.size() == 1) return ins[0];
  bool all_const = true, value = true;
  for (Wire w : ins) {
    auto v = const_value(w);
    if (!v) {
      all_const = false;
      break;
    }
    value = value && *v;
  }
  if (all_const) return constant(value);
  return c_.add_gate(GateKind::And, ins);
}

Wire Builder::or_(std::span<const Wire> ins) {
  if (ins.empty()) return zero_;
  if (ins.size() == 1) return ins[0];
  bool all_const = true, value = false;
  for (Wire w : ins) {
    auto v = const_value(w);
    if (!v) {
      all_const = false;
      break;
    }
    value = value || *v;
  }
  if (all_const) return constant(value);
  return c_.add_gate(GateKind::Or, ins);
}

Wire Builder::threshold(std::span<const Wire> ins, std::uint32_t k) {
  if (k == 0) return one_;
  if (k > ins.size()) return zero_;
  if (k == 1) return or_(ins);
  if (k == ins.size()) return and_(ins);
  std::size_t ones = 0;
  bool all_const = true;
  for (Wire w : ins) {
    auto v = const_value(w);
    if (!v) {
      all_const = false;
      break;
    }
    ones += *v ? 1 : 0;
  }
  if (all_const) return constant(ones >= k);
  return c_.add_gate(GateKind::Threshold, ins, k);
}

Wire Builder::buffer(Wire a) {
  if (const_value(a)) return a;
  return c_.add_gate(GateKind::And, {a});
}

Wire Builder::xor_(Wire a, Wire b) {
  const auto va = const_value(a), vb = const_value(b);
  if (va && vb) return constant(*va != *vb);
  return and_({or_({a, b}), not_(and_({a, b}))});
}

Wire Builder::xnor_(Wire a, Wire b) {
  const auto va = const_value(a), vb = const_value(b);
  if (va && vb) return constant(*va == *vb);
  return or_({and_({a, b}), not_(or_({a, b}))});
}

Wire Builder::mux(Wire sel, Wire a, Wire b) {
  if (auto s = const_value(sel)) return *s ? a : b;
  return or_({and_({sel, a}), and_({not_(sel), b})});
}

std::uint32_t Builder::max_level(const Word& w) const {
  std::uint32_t m = 0;
  for (Wire x : w) m = std::max(m, level(x));
  return m;
}

Word Builder::pad_to_level(const Word& w, std::uint32_t target) {
  Word out = w;
  for (auto& x : out) {
    if (const_value(x)) continue;
    while (level(x) < target) x = c_.add_gate(GateKind::And, {x});
  }
  return out;
}

Word Builder::const_word(const BigInt& value, std::size_t width) const {
  BigInt v = value;
  if (v < 0) v += BigInt(1) << width;  // two's complement
  Word w(width);
  for (std::size_t i = 0; i < width; ++i) w[i] = boost::multiprecision::bit_test(v, static_cast<unsigned>(i)) ? one_ : zero_;
  return w;
}

Word Builder::zero_extend(const Word& w, std::size_t width, Wire zero) {
  Word out(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(std::min(width, w.size())));
  out.resize(width, zero);
  return out;
}

Word Builder::sign_extend(const Word& w, std::size_t width) {
  Word out(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(std::min(width, w.size())));
  const Wire s = w.back();
  out.resize(width, s);
  return out;
}

Word Builder::shift_left(const Word& w, std::size_t k, Wire zero) {
  Word out(k, zero);
  out.insert(out.end(), w.begin(), w.end());
  return out;
}

Word Builder::not_word(const Word& w) {
  Word out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = not_(w[i]);
  return out;
}

Word Builder::and_word(const Word& w, Wire g) {
  Word out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = and_({w[i], g});
  return out;
}

Word Builder::xor_word(const Word& w, Wire g) {
  Word out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = xor_(w[i], g);
  return out;
}

Word Builder::mux_word(Wire sel, const Word& a, const Word& b) {
  if (a.size() != b.size()) throw std::logic_error("mux_word width mismatch");
  if (auto s = const_value(sel)) return *s ? a : b;
  const Wire ns = not_(sel);
  Word out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) {
      out[i] = a[i];
      continue;
    }
    out[i] = or_({and_({sel, a[i]}), and_({ns, b[i]})});
  }
  return out;
}

Builder::Sum Builder::add_carry(const Word& a, const Word& b, Wire cin) {
  const std::size_t w = std::max(a.size(), b.size());
  const Word aa = zero_extend(a, w), bb = zero_extend(b, w);
  if (w == 0) return {{}, cin};
  return policy_ == DepthPolicy::Strict ? cla_strict(aa, bb, cin) : cla_tree(aa, bb, cin);
}

Word Builder::add(const Word& a, const Word& b, std::size_t width, Wire cin) {
  return add_carry(zero_extend(a, width), zero_extend(b, width), cin).sum;
}

Word Builder::negate_if(const Word& w, Wire s) {
  if (auto v = const_value(s); v && !*v) return w;
  return add_carry(xor_word(w, s), Word(w.size(), zero_), s).sum;
}

// Two-level carry lookahead: generate/propagate inside blocks of kBlock bits,
// block carries from block generate/propagate, then carries inside blocks.
Builder::Sum Builder::cla_strict(const Word& a, const Word& b, Wire cin) {
  const std::size_t w = a.size();
  Word g(w), t(w), h(w);
  for (std::size_t i = 0; i < w; ++i) {
    g[i] = and_({a[i], b[i]});
    t[i] = or_({a[i], b[i]});
    h[i] = xor_(a[i], b[i]);
  }
  const bool has_cin = cin != zero_;
  const std::size_t nb = (w + kBlock - 1) / kBlock;
  Word G(nb), T(nb);
  std::vector<Wire> terms, lits;
  for (std::size_t k = 0; k < nb; ++k) {
    const std::size_t s = k * kBlock, e = std::min(w, s + kBlock);
    terms.clear();
    for (std::size_t j = s; j < e; ++j) {
      lits.assign({g[j]});
      for (std::size_t q = j + 1; q < e; ++q) lits.push_back(t[q]);
      terms.push_back(and_(lits));
    }
    G[k] = or_(terms);
    T[k] = and_(std::span<const Wire>(t.data() + s, e - s));
  }
  // carry into block k
  Word C(nb + 1);
  C[0] = cin;
  for (std::size_t k = 1; k <= nb; ++k) {
    terms.clear();
    for (std::size_t j = 0; j < k; ++j) {
      lits.assign({G[j]});
      for (std::size_t q = j + 1; q < k; ++q) lits.push_back(T[q]);
      terms.push_back(and_(lits));
    }
    if (has_cin) {
      lits.assign({cin});
      for (std::size_t q = 0; q < k; ++q) lits.push_back(T[q]);
      terms.push_back(and_(lits));
    }
    C[k] = or_(terms);
  }
  Word sum(w);
  for (std::size_t k = 0; k < nb; ++k) {
    const std::size_t s = k * kBlock, e = std::min(w, s + kBlock);
    const bool block_cin = k > 0 || has_cin;
    for (std::size_t i = s; i < e; ++i) {
      terms.clear();
      for (std::size_t j = s; j < i; ++j) {
        lits.assign({g[j]});
        for (std::size_t q = j + 1; q < i; ++q) lits.push_back(t[q]);
        terms.push_back(and_(lits));
      }
      if (block_cin) {
        lits.assign({C[k]});
        for (std::size_t q = s; q < i; ++q) lits.push_back(t[q]);
        terms.push_back(and_(lits));
      }
      sum[i] = xor_(h[i], or_(terms));
    }
  }
  return {sum, C[nb]};
}

// Kogge-Stone prefix of (generate, propagate) pairs.
Builder::Sum Builder::cla_tree(const Word& a, const Word& b, Wire cin) {
  const std::size_t w = a.size();
  Word g(w), t(w), h(w);
  for (std::size_t i = 0; i < w; ++i) {
    g[i] = and_({a[i], b[i]});
    t[i] = or_({a[i], b[i]});
    h[i] = xor_(a[i], b[i]);
  }
  for (std::size_t d = 1; d < w; d *= 2) {
    Word g2 = g, t2 = t;
    for (std::size_t i = d; i < w; ++i) {
      g2[i] = or_({g[i], and_({t[i], g[i - d]})});
      t2[i] = and_({t[i], t[i - d]});
    }
    g.swap(g2);
    t.swap(t2);
  }
  // carry into bit i+1 = G[0..i] | (T[0..i] & cin)
  Word carry(w + 1);
  carry[0] = cin;
  for (std::size_t i = 0; i < w; ++i) carry[i + 1] = cin == zero_ ? g[i] : or_({g[i], and_({t[i], cin})});
  Word sum(w);
  for (std::size_t i = 0; i < w; ++i) sum[i] = xor_(h[i], carry[i]);
  return {sum, carry[w]};
}

// Binary count of the ones in a column; bit j of the count is the OR over the
// intervals [a, a + 2^j) with bit j of a set, each as T>=a AND NOT T>=(a+2^j).
std::vector<Wire> Builder::count_column(const std::vector<Wire>& col) {
  const std::size_t h = col.size();
  std::vector<Wire> T(h + 2);
  for (std::size_t a = 1; a <= h; ++a) T[a] = threshold(col, static_cast<std::uint32_t>(a));
  std::vector<Wire> notT(h + 2, zero_);
  std::vector<bool> have_not(h + 2, false);
  std::vector<Wire> bits;
  std::vector<Wire> terms;
  for (std::size_t j = 0; (std::size_t{1} << j) <= h; ++j) {
    const std::size_t step = std::size_t{1} << j;
    terms.clear();
    for (std::size_t a = step; a <= h; a += 2 * step) {
      const std::size_t b = a + step;
      if (b > h) {
        terms.push_back(T[a]);
        continue;
      }
      if (!have_not[b]) {
        notT[b] = not_(T[b]);
        have_not[b] = true;
      }
      terms.push_back(and_({T[a], notT[b]}));
    }
    bits.push_back(or_(terms));
  }
  return bits;
}

Word Builder::add_columns(std::vector<std::vector<Wire>> columns, std::size_t width, int rounds) {
  columns.resize(width);
  // Constant zeros carry no information; constant ones are kept as bits.
  for (auto& col : columns) std::erase(col, zero_);
  std::uint32_t base = 0;
  for (const auto& col : columns) {
    for (Wire x : col) base = std::max(base, level(x));
  }
  auto tallest = [&] {
    std::size_t m = 0;
    for (const auto& col : columns) m = std::max(m, col.size());
    return m;
  };
  int done = 0;
  while (rounds < 0 ? tallest() > 2 : done < rounds) {
    std::vector<std::vector<Wire>> next(width);
    for (std::size_t c = 0; c < width; ++c) {
      // Height-2 columns are counted too, so every height shrinks to at most
      // ceil(log2(H + 1)) per round, carries from neighbours included.
      if (columns[c].size() <= 1) {
        for (Wire x : columns[c]) next[c].push_back(x);
        continue;
      }
      const auto bits = count_column(columns[c]);
      for (std::size_t j = 0; j < bits.size() && c + j < width; ++j) next[c + j].push_back(bits[j]);
    }
    columns.swap(next);
    ++done;
  }
  if (tallest() > 2) throw std::logic_error("add_columns: operand count beyond the fixed round budget");
  Word ra(width, zero_), rb(width, zero_);
  for (std::size_t c = 0; c < width; ++c) {
    if (!columns[c].empty()) ra[c] = columns[c][0];
    if (columns[c].size() > 1) rb[c] = columns[c][1];
  }
  if (rounds >= 0) {
    const std::uint32_t target = base + 4 * static_cast<std::uint32_t>(rounds);
    ra = pad_to_level(ra, target);
    rb = pad_to_level(rb, target);
    if (policy_ == DepthPolicy::Strict) {
      // Some widths let the carry network collapse single-term gates; pad to
      // the worst case so the output level depends on nothing but `base`.
      auto sum = pad_to_level(add_carry(ra, rb, zero_).sum, target + kClaDepth);
      if (max_level(sum) > target + kClaDepth) throw std::logic_error("add_columns: adder deeper than its bound");
      return sum;
    }
  }
  return add_carry(ra, rb, zero_).sum;
}

Word Builder::add_rows(const std::vector<Word>& rows, std::size_t width, int rounds) {
  std::vector<std::vector<Wire>> cols(width);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size() && i < width; ++i) cols[i].push_back(r[i]);
  }
  return add_columns(std::move(cols), width, rounds);
}

Word Builder::mul(const Word& a, const Word& b) {
  const std::size_t width = a.size() + b.size();
  std::vector<std::vector<Wire>> cols(width);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) cols[i + j].push_back(and_({a[i], b[j]}));
  }
  return add_columns(std::move(cols), width, -1);
}

Word Builder::mul_const(const Word& a, const BigInt& c) {
  if (c < 0) throw std::logic_error("mul_const needs a non-negative constant");
  const std::size_t cbits = c == 0 ? 1 : static_cast<std::size_t>(boost::multiprecision::msb(c)) + 1;
  const std::size_t width = a.size() + cbits;
  std::vector<std::vector<Wire>> cols(width);
  for (std::size_t k = 0; k < cbits; ++k) {
    if (!boost::multiprecision::bit_test(c, static_cast<unsigned>(k))) continue;
    for (std::size_t i = 0; i < a.size(); ++i) cols[i + k].push_back(a[i]);
  }
  return add_columns(std::move(cols), width, -1);
}

std::vector<Wire> Builder::decode(const Word& w) {
  const std::size_t n = std::size_t{1} << w.size();
  Word neg = not_word(w);
  std::vector<Wire> out(n);
  std::vector<Wire> lits(w.size());
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t i = 0; i < w.size(); ++i) lits[i] = ((v >> i) & 1) ? w[i] : neg[i];
    out[v] = and_(lits);
  }
  return out;
}

std::vector<Wire> Builder::leading_one(const Word& w) {
  const std::size_t n = w.size();
  std::vector<Wire> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 == n) {
      out[i] = w[i];
      continue;
    }
    const Wire higher = or_(std::span<const Wire>(w.data() + i + 1, n - i - 1));
    out[i] = and_({w[i], not_(higher)});
  }
  return out;
}

Word Builder::encode_onehot(const std::vector<Wire>& onehot, std::size_t width) {
  Word out(width);
  std::vector<Wire> terms;
  for (std::size_t b = 0; b < width; ++b) {
    terms.clear();
    for (std::size_t i = 0; i < onehot.size(); ++i) {
      if ((i >> b) & 1) terms.push_back(onehot[i]);
    }
    out[b] = or_(terms);
  }
  return out;
}

Wire Builder::eq_const(const Word& w, const BigInt& c) {
  if (c < 0 || (w.size() < 64 && c >= (BigInt(1) << w.size()))) return zero_;
  std::vector<Wire> lits(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    lits[i] = boost::multiprecision::bit_test(c, static_cast<unsigned>(i)) ? w[i] : not_(w[i]);
  }
  return and_(lits);
}

Wire Builder::ge_const(const Word& w, const BigInt& c) {
  if (c <= 0) return one_;
  if (c >= (BigInt(1) << w.size())) return zero_;
  const std::size_t n = w.size();
  std::vector<Wire> lit(n);
  for (std::size_t i = 0; i < n; ++i) {
    lit[i] = boost::multiprecision::bit_test(c, static_cast<unsigned>(i)) ? w[i] : not_(w[i]);
  }
  // w > c at the first differing bit from the top (w_i = 1, c_i = 0), or w == c.
  std::vector<Wire> terms, cur;
  for (std::size_t i = 0; i < n; ++i) {
    if (boost::multiprecision::bit_test(c, static_cast<unsigned>(i))) continue;
    cur.assign({w[i]});
    for (std::size_t j = i + 1; j < n; ++j) cur.push_back(lit[j]);
    terms.push_back(and_(cur));
  }
  terms.push_back(and_(lit));
  return or_(terms);
}

Wire Builder::greater(const Word& a, const Word& b) {
  const std::size_t n = std::max(a.size(), b.size());
  const Word aa = zero_extend(a, n), bb = zero_extend(b, n);
  Word eq(n), nb(n);
  for (std::size_t i = 0; i < n; ++i) {
    eq[i] = xnor_(aa[i], bb[i]);
    nb[i] = not_(bb[i]);
  }
  std::vector<Wire> terms, cur;
  for (std::size_t i = 0; i < n; ++i) {
    cur.assign({aa[i], nb[i]});
    for (std::size_t j = i + 1; j < n; ++j) cur.push_back(eq[j]);
    terms.push_back(and_(cur));
  }
  return or_(terms);
}

}  // namespace tcvar::gad
