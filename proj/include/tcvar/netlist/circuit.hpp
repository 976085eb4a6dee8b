#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tcvar::net {

enum class GateKind : std::uint8_t { Input, Const0, Const1, And, Or, Not, Majority, Threshold };

const char* to_string(GateKind k);
std::optional<GateKind> parse_kind(std::string_view s);
bool is_source(GateKind k);

using GateId = std::uint32_t;

struct CircuitOptions {
  bool dedup = true;
  /// Keep only kinds and levels. Enough for depth/size scans of circuits too
  /// large to store; evaluation, serialization and dedup are unavailable.
  bool metrics_only = false;
  /// Gate-count cap; 0 means "read TCVAR_MAX_GATES, default 5e7".
  std::uint64_t max_gates = 0;
};

std::uint64_t default_gate_cap();

/// Append-only DAG of unbounded fan-in gates. Ids are dense and every gate's
/// inputs have smaller ids. Inputs of symmetric gates (everything but NOT) are
/// stored sorted, which is what structural hashing keys on.
class Circuit {
public:
  explicit Circuit(CircuitOptions opts = {});

  const CircuitOptions& options() const noexcept { return opts_; }
  bool metrics_only() const noexcept { return opts_.metrics_only; }

  GateId add_input();
  GateId add_const(bool value);
  /// Throws InvalidFanIn / DanglingInput / GateLimitExceeded.
  GateId add_gate(GateKind kind, std::span<const GateId> ins, std::uint32_t k = 0);
  GateId add_gate(GateKind kind, std::initializer_list<GateId> ins, std::uint32_t k = 0) {
    return add_gate(kind, std::span<const GateId>(ins.begin(), ins.size()), k);
  }
  void add_output(GateId id);
  void set_outputs(std::vector<GateId> ids);

  std::size_t size() const noexcept { return kinds_.size(); }
  /// Gates requested through add_gate/add_const/add_input, dedup hits included.
  std::uint64_t raw_size() const noexcept { return requested_; }
  std::uint32_t depth() const;

  GateKind kind(GateId id) const { return static_cast<GateKind>(kinds_[id]); }
  std::uint32_t threshold(GateId id) const;
  std::uint32_t level(GateId id) const { return levels_[id]; }
  std::span<const GateId> fanin(GateId id) const;

  const std::vector<GateId>& inputs() const noexcept { return inputs_; }
  const std::vector<GateId>& outputs() const noexcept { return outputs_; }

  void set_label(GateId id, std::string text);
  /// Next instance number for labels with this prefix, counted per circuit.
  int next_instance(const std::string& name) { return instances_[name]++; }
  const std::string* label(GateId id) const;
  const std::unordered_map<GateId, std::string>& labels() const noexcept { return labels_; }

  /// Local depth accounting: gates created after begin_region() get a level
  /// measured from the region boundary, where anything older counts as 0.
  void begin_region();
  std::uint32_t region_depth() const noexcept { return region_max_; }
  std::uint32_t region_level(GateId id) const;
  std::uint64_t region_size() const noexcept { return size() - region_start_; }
  void end_region();

  std::uint64_t fanin_edges() const noexcept { return fanins_.size(); }

  /// Replaces gate kinds in place (metrics-only lowering helper).
  void relabel_kind(GateId id, GateKind kind) { kinds_[id] = static_cast<std::uint8_t>(kind); }

private:
  GateId append(GateKind kind, std::span<const GateId> ins, std::uint32_t k);
  std::uint64_t hash_gate(GateKind kind, std::uint32_t k, std::span<const GateId> ins) const;
  std::optional<GateId> find_dup(GateKind kind, std::uint32_t k, std::span<const GateId> ins,
                                 std::uint64_t h) const;
  void insert_hash(GateId id, std::uint64_t h);
  void grow_table();

  CircuitOptions opts_;
  std::uint64_t cap_;
  std::uint64_t requested_ = 0;

  std::vector<std::uint8_t> kinds_;
  std::vector<std::uint16_t> levels_;
  std::vector<std::uint32_t> thresholds_;  // empty in metrics mode
  std::vector<std::uint64_t> offsets_{0};  // fanins_[offsets_[i] .. offsets_[i+1])
  std::vector<GateId> fanins_;
  std::unordered_map<std::string, int> instances_;

  std::vector<GateId> inputs_;
  std::vector<GateId> outputs_;
  std::unordered_map<GateId, std::string> labels_;

  std::vector<GateId> table_;  // open addressing, kEmpty marks free slots
  std::size_t table_used_ = 0;

  bool region_active_ = false;
  GateId region_start_ = 0;
  std::uint32_t region_max_ = 0;
  std::vector<std::uint16_t> region_levels_;

  std::optional<GateId> const_ids_[2];
  std::vector<GateId> scratch_;
};

}  // namespace tcvar::net
