#include "tcvar/netlist/circuit.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "tcvar/error.hpp"

namespace tcvar::net {

namespace {

constexpr GateId kEmpty = std::numeric_limits<GateId>::max();

constexpr const char* kNames[] = {"INPUT", "CONST0", "CONST1", "AND", "OR", "NOT", "MAJORITY", "THRESHOLD"};

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h * 0xff51afd7ed558ccdULL;
}

}  // namespace

const char* to_string(GateKind k) { return kNames[static_cast<int>(k)]; }

std::optional<GateKind> parse_kind(std::string_view s) {
  for (int i = 0; i < 8; ++i) {
    if (s == kNames[i]) return static_cast<GateKind>(i);
  }
  return std::nullopt;
}

bool is_source(GateKind k) {
  return k == GateKind::Input || k == GateKind::Const0 || k == GateKind::Const1;
}

std::uint64_t default_gate_cap() {
  if (const char* env = std::getenv("TCVAR_MAX_GATES")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v >= 1) return static_cast<std::uint64_t>(v);
  }
  return 50'000'000ULL;
}

Circuit::Circuit(CircuitOptions opts) : opts_(opts), cap_(opts.max_gates ? opts.max_gates : default_gate_cap()) {
  if (opts_.metrics_only) opts_.dedup = false;
  if (opts_.dedup) table_.assign(1024, kEmpty);
}

GateId Circuit::add_input() {
  ++requested_;
  const GateId id = append(GateKind::Input, {}, 0);
  inputs_.push_back(id);
  return id;
}

GateId Circuit::add_const(bool value) {
  ++requested_;
  auto& slot = const_ids_[value ? 1 : 0];
  if (slot && opts_.dedup) return *slot;
  const GateId id = append(value ? GateKind::Const1 : GateKind::Const0, {}, 0);
  if (!slot) slot = id;
  return id;
}

GateId Circuit::add_gate(GateKind kind, std::span<const GateId> ins, std::uint32_t k) {
  switch (kind) {
    case GateKind::Input:
      if (!ins.empty()) throw InvalidFanIn("INPUT takes no inputs");
      return add_input();
    case GateKind::Const0:
    case GateKind::Const1:
      if (!ins.empty()) throw InvalidFanIn("CONST takes no inputs");
      return add_const(kind == GateKind::Const1);
    case GateKind::Not:
      if (ins.size() != 1) throw InvalidFanIn("NOT needs exactly one input, got " + std::to_string(ins.size()));
      break;
    default:
      if (ins.empty()) throw InvalidFanIn(std::string(to_string(kind)) + " needs at least one input");
  }
  const auto next = static_cast<GateId>(size());
  for (GateId in : ins) {
    if (in >= next) {
      throw DanglingInput("gate input " + std::to_string(in) + " does not precede new gate " + std::to_string(next));
    }
  }
  if (kind != GateKind::Threshold) k = 0;
  ++requested_;

  scratch_.assign(ins.begin(), ins.end());
  if (kind != GateKind::Not) std::sort(scratch_.begin(), scratch_.end());
  if (!opts_.dedup) return append(kind, scratch_, k);

  const std::uint64_t h = hash_gate(kind, k, scratch_);
  if (auto dup = find_dup(kind, k, scratch_, h)) return *dup;
  const GateId id = append(kind, scratch_, k);
  insert_hash(id, h);
  return id;
}

GateId Circuit::append(GateKind kind, std::span<const GateId> ins, std::uint32_t k) {
  if (size() >= cap_) {
    throw GateLimitExceeded("circuit exceeds the gate cap of " + std::to_string(cap_) +
                            " (raise TCVAR_MAX_GATES to allow more)");
  }
  const auto id = static_cast<GateId>(size());
  std::uint32_t lvl = 0;
  std::uint32_t rlvl = 0;
  if (!is_source(kind)) {
    std::uint32_t mx = 0, rmx = 0;
    for (GateId in : ins) {
      mx = std::max<std::uint32_t>(mx, levels_[in]);
      if (region_active_) rmx = std::max(rmx, region_level(in));
    }
    lvl = mx + 1;
    rlvl = rmx + 1;
    if (lvl > std::numeric_limits<std::uint16_t>::max()) throw GateLimitExceeded("circuit depth overflow");
  }
  kinds_.push_back(static_cast<std::uint8_t>(kind));
  levels_.push_back(static_cast<std::uint16_t>(lvl));
  if (region_active_) {
    region_levels_.push_back(static_cast<std::uint16_t>(rlvl));
    region_max_ = std::max(region_max_, rlvl);
  }
  if (!opts_.metrics_only) {
    thresholds_.push_back(k);
    fanins_.insert(fanins_.end(), ins.begin(), ins.end());
    offsets_.push_back(fanins_.size());
  }
  return id;
}

std::uint32_t Circuit::threshold(GateId id) const {
  return opts_.metrics_only ? 0 : thresholds_[id];
}

std::span<const GateId> Circuit::fanin(GateId id) const {
  if (opts_.metrics_only) return {};
  return {fanins_.data() + offsets_[id], static_cast<std::size_t>(offsets_[id + 1] - offsets_[id])};
}

std::uint32_t Circuit::depth() const {
  std::uint32_t d = 0;
  for (GateId o : outputs_) d = std::max<std::uint32_t>(d, levels_[o]);
  return d;
}

void Circuit::add_output(GateId id) {
  if (id >= size()) throw DanglingInput("output refers to missing gate " + std::to_string(id));
  outputs_.push_back(id);
}

void Circuit::set_outputs(std::vector<GateId> ids) {
  outputs_.clear();
  for (GateId id : ids) add_output(id);
}

void Circuit::set_label(GateId id, std::string text) {
  if (opts_.metrics_only) return;
  labels_[id] = std::move(text);
}

const std::string* Circuit::label(GateId id) const {
  auto it = labels_.find(id);
  return it == labels_.end() ? nullptr : &it->second;
}

void Circuit::begin_region() {
  region_active_ = true;
  region_start_ = static_cast<GateId>(size());
  region_max_ = 0;
  region_levels_.clear();
}

std::uint32_t Circuit::region_level(GateId id) const {
  if (!region_active_ || id < region_start_) return 0;
  return region_levels_[id - region_start_];
}

void Circuit::end_region() {
  region_active_ = false;
  region_levels_.clear();
  region_levels_.shrink_to_fit();
}

std::uint64_t Circuit::hash_gate(GateKind kind, std::uint32_t k, std::span<const GateId> ins) const {
  std::uint64_t h = mix(static_cast<std::uint64_t>(kind), k);
  for (GateId in : ins) h = mix(h, in);
  return h;
}

std::optional<GateId> Circuit::find_dup(GateKind kind, std::uint32_t k, std::span<const GateId> ins,
                                        std::uint64_t h) const {
  const std::size_t mask = table_.size() - 1;
  for (std::size_t slot = h & mask;; slot = (slot + 1) & mask) {
    const GateId cand = table_[slot];
    if (cand == kEmpty) return std::nullopt;
    if (this->kind(cand) != kind || thresholds_[cand] != k) continue;
    const auto f = fanin(cand);
    if (std::equal(f.begin(), f.end(), ins.begin(), ins.end())) return cand;
  }
}

void Circuit::insert_hash(GateId id, std::uint64_t h) {
  if (2 * (table_used_ + 1) > table_.size()) {
    grow_table();
  }
  const std::size_t mask = table_.size() - 1;
  std::size_t slot = h & mask;
  while (table_[slot] != kEmpty) slot = (slot + 1) & mask;
  table_[slot] = id;
  ++table_used_;
}

void Circuit::grow_table() {
  std::vector<GateId> old;
  old.swap(table_);
  table_.assign(old.size() * 2, kEmpty);
  const std::size_t mask = table_.size() - 1;
  for (GateId id : old) {
    if (id == kEmpty) continue;
    const std::uint64_t h = hash_gate(kind(id), thresholds_[id], fanin(id));
    std::size_t slot = h & mask;
    while (table_[slot] != kEmpty) slot = (slot + 1) & mask;
    table_[slot] = id;
  }
}

}  // namespace tcvar::net
