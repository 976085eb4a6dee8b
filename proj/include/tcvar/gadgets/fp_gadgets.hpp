#pragma once

#include <span>
#include <string>
#include <vector>

#include "tcvar/fp/fp_num.hpp"
#include "tcvar/gadgets/builder.hpp"

namespace tcvar::gad {

using fp::FpNum;
using fp::Precision;

/// Wires of one FpEncoding, in encoding order (see fp/encoding.hpp).
struct Bundle {
  Precision p;
  std::vector<Wire> bits;
};

/// The encoding fields as words, LSB first.
struct FpWires {
  Wire sign;
  Word mag;   // p bits
  Wire zero;
  Word exp;   // p + 1 bits, two's complement
};

FpWires unpack(const Bundle& b);
Bundle pack(Precision p, const FpWires& w);

Bundle input_bundle(Builder& b, Precision p);
Bundle const_bundle(Builder& b, const FpNum& x);
/// Assignment bits for a bundle made by input_bundle.
std::vector<std::uint8_t> encode_bits(const FpNum& x);
FpNum decode_bits(Precision p, std::span<const std::uint8_t> bits);

struct Flagged {
  Bundle value;
  Wire overflow;
  Wire underflow;
};

/// Rounds sign * M * 2^(E + offset) to p bits with the reference rules
/// (half-even, saturate, flush). E may be absent (treated as 0).
Flagged round_pack(Builder& b, Precision p, Wire sign, const Word& M, const Word* E, std::int64_t offset);

Bundle g_add(Builder& b, const Bundle& x, const Bundle& y);
Bundle g_sub(Builder& b, const Bundle& x, const Bundle& y);
Bundle g_mul(Builder& b, const Bundle& x, const Bundle& y);
/// Quotient digits by unrolled restoring division; output unspecified for y = 0.
Bundle g_div(Builder& b, const Bundle& x, const Bundle& y);
Bundle g_floor(Builder& b, const Bundle& x);
Bundle g_neg(Builder& b, const Bundle& x);

struct CompareWires {
  Wire lt;
  Wire gt;  // both clear means equal
};
CompareWires g_compare(Builder& b, const Bundle& x, const Bundle& y);

/// Fixed number of counting rounds used by g_iter_add; enough for any list
/// shorter than 2^126, so the depth never depends on the list length.
inline constexpr int kIterAddRounds = 4;

Bundle g_iter_add(Builder& b, std::span<const Bundle> xs);
Flagged g_iter_add_flagged(Builder& b, std::span<const Bundle> xs, int rounds = kIterAddRounds);
Bundle g_iter_mul(Builder& b, std::span<const Bundle> xs);

using BundleMatrix = std::vector<std::vector<Bundle>>;
BundleMatrix g_matmul(Builder& b, const BundleMatrix& A, const BundleMatrix& B);

/// Marks a gadget boundary in the netlist as gadget:<name>:<instance>.
void label_gadget(Builder& b, const Bundle& out, const std::string& name);

}  // namespace tcvar::gad
