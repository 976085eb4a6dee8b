#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tcvar/compiler/compile.hpp"

namespace tcvar::harness {

/// Scale list with n tokens: the pyramid (1,1), (2,2), (4,4), ... when n is
/// one of its partial sums, otherwise (1,1) followed by (1, n-1).
std::vector<var::Shape2> scales_for_tokens(std::size_t n);

struct ScanPoint {
  std::string axis;
  std::size_t value = 0;
  std::size_t n = 0;
  int p = 0;
  std::uint32_t depth = 0;
  std::uint32_t attention_depth = 0;  // deepest attention row, unaligned
  std::uint64_t size = 0;
  double compile_ms = 0;
  std::optional<double> eval_ms;  // one 64-lane pass; only when evaluated
};

struct ScanOptions {
  bool evaluate = false;  // build the full circuit and time an evaluation pass
  std::uint64_t max_gates = 0;
};

/// Compiles `base` with one axis replaced ("n" sets the scales, "p" the precision).
ScanPoint scan_point(const var::ModelConfig& base, const std::string& axis, std::size_t value, const ScanOptions& o = {});
std::string scan_csv(const std::vector<ScanPoint>& pts, bool times = true);
/// Two panels as a standalone SVG: size (log-log) and depth against the axis value.
std::string scan_svg(const std::vector<ScanPoint>& pts);

struct Fit {
  double slope = 0, intercept = 0, r2 = 0;
};
/// Least squares of log(y) on log(x).
Fit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Gadget names accepted by exhaustive_op.
const std::vector<std::string>& op_names();

struct OpCheck {
  std::string op;
  std::uint64_t cases = 0, passed = 0, failed = 0, skipped = 0;
  std::optional<std::string> counterexample;
};

/// Every valid operand (pair) at precision p through the gadget circuit vs the
/// reference. Division by zero and sqrt of negatives are skipped. Throws
/// ConfigError for an unknown op.
OpCheck exhaustive_op(const std::string& op, fp::Precision p, gad::DepthPolicy policy = gad::DepthPolicy::Strict);

}  // namespace tcvar::harness
