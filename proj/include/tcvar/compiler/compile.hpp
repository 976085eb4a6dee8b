#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tcvar/compiler/gate_backend.hpp"
#include "tcvar/netlist/circuit.hpp"
#include "tcvar/var/config.hpp"
#include "tcvar/var/weights.hpp"

namespace tcvar::cc {

struct CompileOptions {
  bool metrics_only = false;  // depth/size only, for circuits too large to store
  bool align = true;          // buffer each layer's outputs up to its bound
  std::uint64_t max_gates = 0;
};

/// Values fed to a compiled model: X0 (d entries), plus in indices mode one
/// token index per position of every scale, scales in order, rows row-major.
struct ModelInput {
  std::vector<FpNum> x0;
  std::vector<std::vector<std::size_t>> indices;
};

struct CompiledModel {
  var::ModelConfig cfg;
  var::ModelWeights weights;
  net::Circuit circuit;
  DepthReport report;
};

/// Phase 1 -> 2 -> 3 as one circuit. Inputs: the encodings of X0, then in
/// indices mode c_vae one-hot wires per token position. Outputs: the decoded
/// map's encodings (row-major, channel fastest), then in indices mode the
/// phase-1 token encodings.
CompiledModel compile_model(const var::ModelConfig& cfg, const CompileOptions& opts = {});
/// Same, reusing constants already measured for (p, policy, transcendental).
CompiledModel compile_model(const var::ModelConfig& cfg, const gad::GadgetConstants& constants,
                            const CompileOptions& opts = {});

/// Assignment bits for a model input.
std::vector<std::uint8_t> input_bits(const var::ModelConfig& cfg, const ModelInput& in);
/// Reference outputs in circuit output order. Throws RowSumZero when the
/// reference cannot normalise an attention row.
std::vector<FpNum> reference_outputs(const var::ModelConfig& cfg, const var::ModelWeights& w, const ModelInput& in);
/// Input for trial `trial` under `seed`: X0 entries uniform in [-1, 1), uniform indices.
ModelInput random_input(const var::ModelConfig& cfg, std::uint64_t seed, std::uint64_t trial);

/// Evaluates the circuit on up to 64 assignments per pass and decodes the
/// outputs as p-bit values.
std::vector<std::vector<FpNum>> evaluate_values(const net::Circuit& c, Precision p,
                                                const std::vector<std::vector<std::uint8_t>>& rows);

struct Counterexample {
  std::uint64_t trial = 0;
  std::string input_bits;  // '0'/'1', circuit input order
  std::vector<FpNum> expected, actual;
  std::size_t first_diff = 0;
};

struct VerifyResult {
  std::uint64_t passed = 0, failed = 0, skipped = 0;
  std::optional<Counterexample> counterexample;
};

/// Circuit vs reference on `trials` seeded random inputs; trials whose
/// reference hits a zero attention row sum are counted as skipped.
VerifyResult verify_model(const CompiledModel& m, const net::Circuit& c, std::uint64_t trials, std::uint64_t seed);

/// Copy of `c` with gate `id` inverted: a constant flips its value, any other
/// gate feeds its consumers through a NOT. Throws IndexOutOfRange.
net::Circuit inject_fault(const net::Circuit& c, net::GateId id);
/// First constant gate that some output depends on, if any.
std::optional<net::GateId> live_constant(const net::Circuit& c);

// Single-layer fragments over fresh input bundles (inputs and outputs
// row-major, channel fastest). No alignment, so depths are the layer's own.

struct Fragment {
  net::Circuit circuit;
  LayerRow row;
};

Fragment compile_up_interpolation(Precision p, gad::DepthPolicy policy, const gad::GadgetConstants& k, std::size_t h,
                                  std::size_t w, std::size_t c, std::size_t h2, std::size_t w2);
Fragment compile_attention(Precision p, gad::DepthPolicy policy, gad::TransImpl impl, const gad::GadgetConstants& k,
                           std::size_t n, const var::Mat<FpNum>& Wq, const var::Mat<FpNum>& Wk,
                           const var::Mat<FpNum>& Wv);
Fragment compile_mlp(Precision p, gad::DepthPolicy policy, const gad::GadgetConstants& k, std::size_t n,
                     const var::Mat<FpNum>& W, const std::vector<FpNum>& b);
Fragment compile_layernorm(Precision p, gad::DepthPolicy policy, gad::TransImpl impl, const gad::GadgetConstants& k,
                           std::size_t n, std::size_t d);
Fragment compile_conv(Precision p, gad::DepthPolicy policy, const gad::GadgetConstants& k, std::size_t h,
                      std::size_t w, std::size_t c, const std::vector<var::ConvKernel>& kernels);

}  // namespace tcvar::cc
