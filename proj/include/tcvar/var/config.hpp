#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tcvar/gadgets/builder.hpp"
#include "tcvar/gadgets/transcendental.hpp"

namespace tcvar::var {

struct Shape2 {
  std::size_t h = 1, w = 1;
  friend bool operator==(const Shape2&, const Shape2&) = default;
};

enum class BlockKind { ResNet, Attention, UpSample };
const char* to_string(BlockKind k);

struct BlockSpec {
  BlockKind kind = BlockKind::ResNet;
  Shape2 kernel{1, 1};    // ResNet: must be 1x1 so the residual shapes agree
  std::size_t factor = 2;  // UpSample only
};

/// Where phase 2 takes its token maps from.
///   transformer: phase-1 token features weight the codebook rows (x C)
///   indices:     one-hot token indices are extra circuit inputs; phase-1
///                tokens are then appended to the outputs
enum class Phase2Input { Transformer, Indices };

enum class WeightInit { Random, Identity };

struct ModelConfig {
  int p = 4;
  std::size_t d = 2;
  std::size_t m = 2;
  std::vector<Shape2> scales{{1, 1}};
  gad::DepthPolicy policy = gad::DepthPolicy::Strict;
  gad::TransImpl transcendental = gad::TransImpl::Auto;
  std::uint64_t seed = 0;
  WeightInit weights = WeightInit::Random;
  bool ln_pre = true;
  bool ln_post = true;
  std::size_t c_vae = 2;  // codebook rows
  std::size_t d_vae = 2;  // codebook width
  Phase2Input phase2_input = Phase2Input::Transformer;
  std::size_t phase2_kernels = 2;
  Shape2 phase2_kernel{1, 1};
  std::vector<BlockSpec> decoder;
  std::size_t max_entries = std::size_t{1} << 14;

  /// Tokens after growth: sum of h*w over the scales.
  std::size_t tokens() const;
  Shape2 final_scale() const { return scales.back(); }
};

/// Throws ConfigError naming the offending field.
void validate(const ModelConfig& cfg);

ModelConfig parse_config(const std::string& json_text);
ModelConfig load_config(const std::string& path);
std::string to_json(const ModelConfig& cfg);

}  // namespace tcvar::var
