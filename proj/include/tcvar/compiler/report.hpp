#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcvar/gadgets/constants.hpp"
#include "tcvar/var/ops.hpp"

namespace tcvar::cc {

using var::LayerKind;

/// Depth bound of one layer kind in terms of the measured gadget constants.
std::uint32_t layer_bound(LayerKind k, const gad::GadgetConstants& c);
const char* bound_formula(LayerKind k);

struct LayerRow {
  std::string name;
  LayerKind kind = LayerKind::Mlp;
  std::uint32_t depth = 0;  // local: levels added by the layer's own gates
  std::uint64_t size = 0;   // gates requested inside the layer
  std::uint32_t bound = 0;
};

struct Totals {
  std::uint32_t depth = 0;
  std::uint64_t size = 0;
  std::uint64_t raw_size = 0;  // counting structural-hash hits
  std::size_t n = 0;
  int p = 0;
  gad::DepthPolicy policy = gad::DepthPolicy::Strict;
  std::size_t inputs = 0;
  std::size_t outputs = 0;
};

struct DepthReport {
  gad::GadgetConstants constants;
  std::vector<LayerRow> layers;
  Totals totals;
};

struct BoundVerdict {
  std::string name;
  std::uint32_t depth = 0;
  std::uint32_t bound = 0;
  bool pass = false;
};

/// Recomputes every row's bound from the report's constants and compares.
std::vector<BoundVerdict> check_bounds(const DepthReport& r);
bool all_pass(const std::vector<BoundVerdict>& v);

std::string report_json(const DepthReport& r);
/// name,kind,depth,size,bound,verdict with a header row.
std::string report_csv(const DepthReport& r);

}  // namespace tcvar::cc
