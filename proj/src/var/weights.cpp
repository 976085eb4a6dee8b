#include "tcvar/var/weights.hpp"

#include <random>

#include "tcvar/var/model.hpp"

namespace tcvar::var {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

struct Filler {
  const ModelConfig& cfg;
  Precision p;

  bool random() const { return cfg.weights == WeightInit::Random; }

  Mat<FpNum> square(const std::string& name, std::size_t n, bool identity) const {
    if (random()) return Mat<FpNum>{n, n, uniform_values(cfg.seed, name, n * n, p)};
    auto m = Mat<FpNum>::filled(n, n, FpNum::zero(p));
    if (identity) {
      for (std::size_t i = 0; i < n; ++i) m.at(i, i) = FpNum::one(p);
    }
    return m;
  }

  std::vector<FpNum> vec(const std::string& name, std::size_t n) const {
    if (random()) return uniform_values(cfg.seed, name, n, p);
    return std::vector<FpNum>(n, FpNum::zero(p));
  }

  // `count` kernels of h x w x c; identity picks channel j at the top-left tap.
  std::vector<ConvKernel> kernels(const std::string& name, std::size_t count, Shape2 k, std::size_t c,
                                  bool identity) const {
    std::vector<ConvKernel> out;
    for (std::size_t j = 0; j < count; ++j) {
      const std::string kn = name + "[" + std::to_string(j) + "]";
      ConvKernel K{k.h, k.w, c, {}, FpNum::zero(p)};
      if (random()) {
        auto v = uniform_values(cfg.seed, kn, k.h * k.w * c + 1, p);
        K.b = v.back();
        v.pop_back();
        K.K = std::move(v);
      } else {
        K.K.assign(k.h * k.w * c, FpNum::zero(p));
        if (identity && j < c) K.K[j] = FpNum::one(p);
      }
      out.push_back(std::move(K));
    }
    return out;
  }
};

}  // namespace

std::vector<FpNum> uniform_values(std::uint64_t seed, const std::string& name, std::size_t count, Precision p) {
  std::mt19937_64 g(seed ^ (fnv1a(name) * 0x9E3779B97F4A7C15ull));
  std::vector<FpNum> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = static_cast<double>(g() >> 11) * 0x1.0p-53;
    out.push_back(fp::from_double(2.0 * u - 1.0, p));
  }
  return out;
}

ModelWeights make_weights(const ModelConfig& cfg) {
  validate(cfg);
  const Filler f{cfg, Precision(cfg.p)};
  ModelWeights w;
  for (std::size_t i = 0; i < cfg.m; ++i) {
    const std::string L = "L" + std::to_string(i + 1) + ".";
    LayerWeights lw;
    lw.Wq = f.square(L + "Wq", cfg.d, false);
    lw.Wk = f.square(L + "Wk", cfg.d, false);
    lw.Wv = f.square(L + "Wv", cfg.d, true);
    lw.W = f.square(L + "W", cfg.d, true);
    lw.b = f.vec(L + "b", cfg.d);
    w.layers.push_back(std::move(lw));
  }
  if (f.random()) {
    w.codebook = Mat<FpNum>{cfg.c_vae, cfg.d_vae, uniform_values(cfg.seed, "codebook", cfg.c_vae * cfg.d_vae, f.p)};
  } else {
    w.codebook = Mat<FpNum>::filled(cfg.c_vae, cfg.d_vae, FpNum::zero(f.p));
    for (std::size_t i = 0; i < std::min(cfg.c_vae, cfg.d_vae); ++i) w.codebook.at(i, i) = FpNum::one(f.p);
  }
  w.phase2 = f.kernels("P2.kernel", cfg.phase2_kernels, cfg.phase2_kernel, cfg.d_vae, true);
  const std::size_t ch = cfg.phase2_kernels;
  for (std::size_t i = 0; i < cfg.decoder.size(); ++i) {
    const auto& spec = cfg.decoder[i];
    const std::string D = "D" + std::to_string(i + 1) + ".";
    BlockWeights bw;
    bw.kind = spec.kind;
    switch (spec.kind) {
      case BlockKind::ResNet:
        bw.conv1 = f.kernels(D + "conv1", ch, spec.kernel, ch, false);
        bw.conv2 = f.kernels(D + "conv2", ch, spec.kernel, ch, false);
        break;
      case BlockKind::Attention:
        bw.Wq = f.square(D + "Wq", ch, false);
        bw.Wk = f.square(D + "Wk", ch, false);
        bw.Wv = f.square(D + "Wv", ch, true);
        break;
      case BlockKind::UpSample:
        bw.factor = spec.factor;
        bw.conv1 = f.kernels(D + "conv", ch, spec.kernel, ch, true);
        break;
    }
    w.decoder.push_back(std::move(bw));
  }
  return w;
}

std::vector<std::vector<std::pair<std::size_t, Shape2>>> growth_schedule(const ModelConfig& cfg) {
  std::vector<std::vector<std::pair<std::size_t, Shape2>>> s(cfg.m);
  for (std::size_t k = 0; k < cfg.scales.size(); ++k) s[0].emplace_back(0, cfg.scales[k]);
  for (std::size_t i = 1; i < cfg.m; ++i) {
    for (std::size_t k = 0; k < cfg.scales.size(); ++k) s[i].emplace_back(k, cfg.scales[k]);
  }
  return s;
}

Map<FpNum> codebook_lookup(const std::vector<std::size_t>& indices, std::size_t h, std::size_t w, const Mat<FpNum>& C) {
  if (indices.size() != h * w) throw ShapeMismatch("index map size differs from h*w");
  Map<FpNum> out{h, w, C.cols, {}};
  for (std::size_t idx : indices) {
    if (idx >= C.rows) throw IndexOutOfRange("token index " + std::to_string(idx) + " outside the codebook");
    for (std::size_t k = 0; k < C.cols; ++k) out.a.push_back(C.at(idx, k));
  }
  return out;
}

}  // namespace tcvar::var
