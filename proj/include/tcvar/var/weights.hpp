#pragma once

#include <string>
#include <vector>

#include "tcvar/var/config.hpp"
#include "tcvar/var/ops.hpp"

namespace tcvar::var {

struct LayerWeights {
  Mat<FpNum> Wq, Wk, Wv, W;
  std::vector<FpNum> b;
};

struct BlockWeights {
  BlockKind kind = BlockKind::ResNet;
  std::vector<ConvKernel> conv1, conv2;  // ResNet: both; UpSample: conv1
  Mat<FpNum> Wq, Wk, Wv;                 // Attention
  std::size_t factor = 1;
};

struct ModelWeights {
  std::vector<LayerWeights> layers;
  Mat<FpNum> codebook;  // c_vae x d_vae
  std::vector<ConvKernel> phase2;
  std::vector<BlockWeights> decoder;
};

/// Uniform in [-1, 1) rounded to p bits, one stream per tensor name, or the
/// identity initialisation (W_Q = W_K = 0, W_V = W = I, b = 0, C = I, 1x1
/// identity kernels, zero ResNet kernels).
ModelWeights make_weights(const ModelConfig& cfg);

/// Deterministic stream of p-bit values in [-1, 1) for `name` under `seed`.
std::vector<FpNum> uniform_values(std::uint64_t seed, const std::string& name, std::size_t count, Precision p);

}  // namespace tcvar::var
