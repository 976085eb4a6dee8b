#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcvar/gadgets/transcendental.hpp"

namespace tcvar::gad {

struct GadgetMetric {
  std::string name;
  std::uint32_t depth = 0;
  std::uint64_t size = 0;
};

/// Depths of each gadget built alone on fresh inputs.
struct GadgetConstants {
  int p = 0;
  DepthPolicy policy = DepthPolicy::Strict;
  TransImpl impl = TransImpl::Auto;  // resolved
  std::uint32_t d_std = 0;   // max over add, mul, div, compare, floor
  std::uint32_t d_add = 0;   // iterated addition (d_⊕), measured at n = 8
  std::uint32_t d_mul = 0;   // iterated multiplication (d_⊗), n = 2 under STRICT, 4 under TREE
  std::uint32_t d_exp = 0;
  std::uint32_t d_sqrt = 0;
  std::uint32_t d_add_n64 = 0;  // cross-check: must equal d_add
  std::vector<GadgetMetric> gadgets;
};

GadgetConstants measure_constants(Precision p, DepthPolicy policy, TransImpl impl = TransImpl::Auto);

}  // namespace tcvar::gad
