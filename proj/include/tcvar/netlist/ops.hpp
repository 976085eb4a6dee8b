#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tcvar/netlist/circuit.hpp"

namespace tcvar::net {

/// One bit per input in, one bit per output out. Throws ArityMismatch.
std::vector<std::uint8_t> evaluate(const Circuit& c, const std::vector<std::uint8_t>& assignment);

/// 64 assignments at once: lane j of word i is input i of assignment j.
std::vector<std::uint64_t> evaluate_batch(const Circuit& c, const std::vector<std::uint64_t>& lanes);

/// Same as evaluate_batch but returns the value of every gate.
std::vector<std::uint64_t> evaluate_all(const Circuit& c, const std::vector<std::uint64_t>& lanes);

/// Level of every gate, recomputed from the fan-in lists.
std::vector<std::uint32_t> levelize(const Circuit& c);

std::uint32_t depth(const Circuit& c);
std::size_t size(const Circuit& c);

/// Whether a THRESHOLD(k) gate over f inputs fires with `ones` inputs set.
bool threshold_fires(std::uint32_t k, std::size_t ones);
bool majority_fires(std::size_t fanin, std::size_t ones);

/// Padding that turns THRESHOLD(k) over f inputs into a strict MAJORITY.
struct MajorityPadding {
  std::size_t ones = 0;
  std::size_t zeros = 0;
};
MajorityPadding majority_padding(std::uint32_t k, std::size_t fanin);

/// Rewrites every THRESHOLD(k) as one MAJORITY over its inputs plus constant
/// padding. Levels are unchanged since constants sit at level 0.
Circuit lower_thresholds(const Circuit& c);

std::string serialize(const Circuit& c);
/// Throws ParseError with the offending line number.
Circuit deserialize(std::string_view text, CircuitOptions opts = {});

}  // namespace tcvar::net
