#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "tcvar/fp/fp_num.hpp"
#include "tcvar/netlist/circuit.hpp"

namespace tcvar::gad {

/// STRICT: every integer adder is a flattened carry-lookahead and iterated
/// products beyond two operands are refused. TREE: prefix-tree adders and
/// tree-shaped iterated products are allowed.
enum class DepthPolicy { Strict, Tree };

const char* to_string(DepthPolicy p);
std::optional<DepthPolicy> parse_policy(std::string_view s);

using Wire = net::GateId;
using Word = std::vector<Wire>;  // LSB first
using fp::BigInt;

/// Bit and word level construction on top of a Circuit.
///
/// A gate whose inputs are all constants is folded to a constant. Gates with
/// only some constant inputs are built as-is, so the depth of a construction
/// never depends on the value of a baked-in constant.
class Builder {
public:
  explicit Builder(net::Circuit& c, DepthPolicy policy = DepthPolicy::Strict);

  net::Circuit& circuit() noexcept { return c_; }
  const net::Circuit& circuit() const noexcept { return c_; }
  DepthPolicy policy() const noexcept { return policy_; }

  Wire input() { return c_.add_input(); }
  Word inputs(std::size_t n);

  Wire zero() const noexcept { return zero_; }
  Wire one() const noexcept { return one_; }
  Wire constant(bool v) const noexcept { return v ? one_ : zero_; }
  std::optional<bool> const_value(Wire w) const;
  std::uint32_t level(Wire w) const { return c_.level(w); }

  // Single gates.
  Wire not_(Wire a);
  Wire and_(std::span<const Wire> ins);
  Wire or_(std::span<const Wire> ins);
  Wire and_(std::initializer_list<Wire> ins) { return and_(std::span<const Wire>(ins.begin(), ins.size())); }
  Wire or_(std::initializer_list<Wire> ins) { return or_(std::span<const Wire>(ins.begin(), ins.size())); }
  Wire threshold(std::span<const Wire> ins, std::uint32_t k);
  Wire buffer(Wire a);

  // Small compositions.
  Wire xor_(Wire a, Wire b);
  Wire xnor_(Wire a, Wire b);
  /// sel ? a : b
  Wire mux(Wire sel, Wire a, Wire b);

  /// Raises every wire to exactly `target` with single-input buffers.
  Word pad_to_level(const Word& w, std::uint32_t target);
  std::uint32_t max_level(const Word& w) const;

  // Words.
  Word const_word(const BigInt& value, std::size_t width) const;
  static Word zero_extend(const Word& w, std::size_t width, Wire zero);
  Word zero_extend(const Word& w, std::size_t width) const { return zero_extend(w, width, zero_); }
  static Word sign_extend(const Word& w, std::size_t width);
  static Word shift_left(const Word& w, std::size_t k, Wire zero);
  Word shift_left(const Word& w, std::size_t k) const { return shift_left(w, k, zero_); }

  Word not_word(const Word& w);
  Word and_word(const Word& w, Wire g);
  Word xor_word(const Word& w, Wire g);
  /// sel ? a : b, widths must agree
  Word mux_word(Wire sel, const Word& a, const Word& b);

  struct Sum {
    Word sum;
    Wire carry;
  };
  /// a + b + cin over max(|a|,|b|) bits, with the carry out.
  Sum add_carry(const Word& a, const Word& b, Wire cin);
  /// (a + b + cin) mod 2^width, operands zero-extended.
  Word add(const Word& a, const Word& b, std::size_t width, Wire cin);
  Word add(const Word& a, const Word& b, std::size_t width) { return add(a, b, width, zero_); }
  /// Two's complement negation of w when s is set (width preserved).
  Word negate_if(const Word& w, Wire s);

  /// Sum of arbitrary columns of bits, mod 2^width. Each counting round turns
  /// a column of height h into the binary count of its ones; `rounds` fixed
  /// rounds (or as many as needed when negative) are run before the final
  /// two-row carry-lookahead addition. With a fixed round count the output
  /// level is independent of the column heights.
  Word add_columns(std::vector<std::vector<Wire>> columns, std::size_t width, int rounds);
  Word add_rows(const std::vector<Word>& rows, std::size_t width, int rounds = -1);

  /// Unsigned product, full width |a| + |b|.
  Word mul(const Word& a, const Word& b);
  /// Unsigned product with a non-negative constant, full width.
  Word mul_const(const Word& a, const BigInt& c);

  /// One-hot decode: out[v] = (w == v), 2^|w| wires.
  std::vector<Wire> decode(const Word& w);
  /// out[i] = w[i] and no higher bit set.
  std::vector<Wire> leading_one(const Word& w);
  /// Binary value of a one-hot vector.
  Word encode_onehot(const std::vector<Wire>& onehot, std::size_t width);
  /// Unsigned w == c / w >= c against a constant.
  Wire eq_const(const Word& w, const BigInt& c);
  Wire ge_const(const Word& w, const BigInt& c);
  /// Unsigned a > b.
  Wire greater(const Word& a, const Word& b);

private:
  Sum cla_strict(const Word& a, const Word& b, Wire cin);
  Sum cla_tree(const Word& a, const Word& b, Wire cin);
  std::vector<Wire> count_column(const std::vector<Wire>& col);

  net::Circuit& c_;
  DepthPolicy policy_;
  Wire zero_;
  Wire one_;
  std::vector<Wire> scratch_;
};

}  // namespace tcvar::gad
