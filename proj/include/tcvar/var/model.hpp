#pragma once

#include <optional>
#include <string>

#include "tcvar/var/config.hpp"
#include "tcvar/var/ops.hpp"
#include "tcvar/var/weights.hpp"

namespace tcvar::var {

/// Phase-1 growth: per layer, each output map is (source map, target shape).
/// Layer 1 expands the single 1x1 input map to every configured scale; later
/// layers resample each map onto its own shape.
std::vector<std::vector<std::pair<std::size_t, Shape2>>> growth_schedule(const ModelConfig& cfg);

/// Plain codebook lookup: the row C[index] at every position.
Map<FpNum> codebook_lookup(const std::vector<std::size_t>& indices, std::size_t h, std::size_t w, const Mat<FpNum>& C);

template <class B>
TokenSequence<ValueOf<B>> var_transformer(B& be, const ModelConfig& cfg, const ModelWeights& wts,
                                          const Mat<ValueOf<B>>& X0) {
  if (X0.rows != 1 || X0.cols != cfg.d) throw ShapeMismatch("transformer input must be 1 x d");
  TokenSequence<ValueOf<B>> seq{Map<ValueOf<B>>{1, 1, cfg.d, X0.a}};
  const auto schedule = growth_schedule(cfg);
  for (std::size_t i = 0; i < cfg.m; ++i) {
    const std::string L = "L" + std::to_string(i + 1) + ".";
    TokenSequence<ValueOf<B>> grown;
    for (std::size_t k = 0; k < schedule[i].size(); ++k) {
      const auto& [src, shape] = schedule[i][k];
      grown.push_back(up_interpolate(be, seq[src], shape.h, shape.w, L + "up[" + std::to_string(k) + "]"));
    }
    seq = std::move(grown);
    const auto& lw = wts.layers[i];
    auto X = attention_layer(be, stack(seq), lw.Wq, lw.Wk, lw.Wv, L + "attention");
    if (cfg.ln_pre) X = layer_norm(be, X, L + "ln_pre");
    X = mlp(be, X, lw.W, lw.b, L + "mlp");
    if (cfg.ln_post) X = layer_norm(be, X, L + "ln_post");
    seq = unstack(X, seq);
  }
  return seq;
}

/// Embedded per-scale maps -> upsample to the final scale, convolve, sum.
template <class B>
Map<ValueOf<B>> reconstruct_feature_map(B& be, const TokenSequence<ValueOf<B>>& embedded, Shape2 target,
                                        const std::vector<ConvKernel>& kernels) {
  std::vector<Map<ValueOf<B>>> parts;
  for (std::size_t k = 0; k < embedded.size(); ++k) {
    const std::string tag = "P2.scale[" + std::to_string(k) + "].";
    const auto up = up_interpolate(be, embedded[k], target.h, target.w, tag + "up");
    parts.push_back(conv2d(be, up, kernels, tag + "conv"));
  }
  return sum_maps(be, parts, "P2.sum");
}

template <class B>
Map<ValueOf<B>> vqvae_decode(B& be, Map<ValueOf<B>> F, const std::vector<BlockWeights>& blocks) {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& bw = blocks[i];
    const std::string tag = "D" + std::to_string(i + 1) + "." + to_string(bw.kind);
    switch (bw.kind) {
      case BlockKind::ResNet: {
        const auto y = conv2d(be, conv2d(be, F, bw.conv1, tag + ".conv1"), bw.conv2, tag + ".conv2");
        if (y.h != F.h || y.w != F.w || y.c != F.c) throw ShapeMismatch("residual branch changed the map shape");
        be.begin_layer(tag + ".residual", LayerKind::Residual);
        for (std::size_t k = 0; k < F.a.size(); ++k) F.a[k] = be.add(F.a[k], y.a[k]);
        F.a = be.end_layer(std::move(F.a));
        break;
      }
      case BlockKind::Attention: {
        const auto X = attention_layer(be, flatten(F), bw.Wq, bw.Wk, bw.Wv, tag);
        F = unflatten(X, F.h, F.w);
        break;
      }
      case BlockKind::UpSample: {
        const auto up = up_interpolate(be, F, F.h * bw.factor, F.w * bw.factor, tag + ".up");
        F = conv2d(be, up, bw.conv1, tag + ".conv");
        break;
      }
    }
  }
  return F;
}

template <class B>
struct PipelineResult {
  TokenSequence<ValueOf<B>> tokens;  // phase 1 output
  Map<ValueOf<B>> features;          // phase 2 output
  Map<ValueOf<B>> image;             // phase 3 output
};

/// All three phases. `embedded` replaces the codebook step when phase 2 reads
/// token indices (already looked up by the caller).
template <class B>
PipelineResult<B> run_pipeline(B& be, const ModelConfig& cfg, const ModelWeights& wts, const Mat<ValueOf<B>>& X0,
                               const TokenSequence<ValueOf<B>>* embedded = nullptr) {
  PipelineResult<B> r;
  r.tokens = var_transformer(be, cfg, wts, X0);
  TokenSequence<ValueOf<B>> emb;
  if (embedded != nullptr) {
    emb = *embedded;
  } else {
    for (std::size_t k = 0; k < r.tokens.size(); ++k) {
      emb.push_back(soft_lookup(be, r.tokens[k], wts.codebook, "P2.scale[" + std::to_string(k) + "].codebook"));
    }
  }
  r.features = reconstruct_feature_map(be, emb, cfg.final_scale(), wts.phase2);
  r.image = vqvae_decode(be, r.features, wts.decoder);
  return r;
}

}  // namespace tcvar::var
