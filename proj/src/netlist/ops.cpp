#include "tcvar/netlist/ops.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "tcvar/error.hpp"

namespace tcvar::net {

namespace {

void require_full(const Circuit& c, const char* what) {
  if (c.metrics_only()) throw Error("netlist", std::string(what) + " needs a circuit with stored fan-ins");
}

// Lane-wise "count of set inputs >= k" over 64 lanes with bit-sliced counters.
std::uint64_t count_at_least(const std::vector<std::uint64_t>& val, std::span<const GateId> ins, std::size_t k) {
  if (k == 0) return ~0ULL;
  if (k > ins.size()) return 0;
  if (k == 1) {
    std::uint64_t r = 0;
    for (GateId g : ins) r |= val[g];
    return r;
  }
  if (k == ins.size()) {
    std::uint64_t r = ~0ULL;
    for (GateId g : ins) r &= val[g];
    return r;
  }
  std::uint64_t planes[32] = {};
  int width = 0;
  while ((std::size_t{1} << width) <= ins.size()) ++width;
  for (GateId g : ins) {
    std::uint64_t carry = val[g];
    for (int b = 0; b < width && carry; ++b) {
      const std::uint64_t t = planes[b] & carry;
      planes[b] ^= carry;
      carry = t;
    }
  }
  // count >= k, comparing from the top bit down.
  std::uint64_t gt = 0, eq = ~0ULL;
  for (int b = width - 1; b >= 0; --b) {
    const bool kb = (k >> b) & 1;
    if (kb) {
      eq &= planes[b];
    } else {
      gt |= eq & planes[b];
      eq &= ~planes[b];
    }
  }
  return gt | eq;
}

}  // namespace

bool threshold_fires(std::uint32_t k, std::size_t ones) { return ones >= k; }
bool majority_fires(std::size_t fanin, std::size_t ones) { return ones >= fanin / 2 + 1; }

MajorityPadding majority_padding(std::uint32_t k, std::size_t fanin) {
  const auto f = static_cast<std::int64_t>(fanin);
  const auto kk = static_cast<std::int64_t>(k);
  if (2 * kk - 1 >= f) return {0, static_cast<std::size_t>(2 * kk - 1 - f)};
  return {static_cast<std::size_t>(f - 2 * kk + 1), 0};
}

std::vector<std::uint64_t> evaluate_all(const Circuit& c, const std::vector<std::uint64_t>& lanes) {
  require_full(c, "evaluation");
  if (lanes.size() != c.inputs().size()) {
    throw ArityMismatch("assignment has " + std::to_string(lanes.size()) + " bits, circuit has " +
                        std::to_string(c.inputs().size()) + " inputs");
  }
  std::vector<std::uint64_t> val(c.size(), 0);
  std::size_t next_input = 0;
  for (GateId id = 0; id < c.size(); ++id) {
    const auto ins = c.fanin(id);
    std::uint64_t v = 0;
    switch (c.kind(id)) {
      case GateKind::Input: v = lanes[next_input++]; break;
      case GateKind::Const0: v = 0; break;
      case GateKind::Const1: v = ~0ULL; break;
      case GateKind::And:
        v = ~0ULL;
        for (GateId g : ins) v &= val[g];
        break;
      case GateKind::Or:
        for (GateId g : ins) v |= val[g];
        break;
      case GateKind::Not: v = ~val[ins[0]]; break;
      case GateKind::Majority: v = count_at_least(val, ins, ins.size() / 2 + 1); break;
      case GateKind::Threshold: v = count_at_least(val, ins, c.threshold(id)); break;
    }
    val[id] = v;
  }
  return val;
}

std::vector<std::uint64_t> evaluate_batch(const Circuit& c, const std::vector<std::uint64_t>& lanes) {
  const auto val = evaluate_all(c, lanes);
  std::vector<std::uint64_t> out;
  out.reserve(c.outputs().size());
  for (GateId o : c.outputs()) out.push_back(val[o]);
  return out;
}

std::vector<std::uint8_t> evaluate(const Circuit& c, const std::vector<std::uint8_t>& assignment) {
  std::vector<std::uint64_t> lanes(assignment.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) lanes[i] = assignment[i] ? 1 : 0;
  const auto out = evaluate_batch(c, lanes);
  std::vector<std::uint8_t> bits(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) bits[i] = out[i] & 1;
  return bits;
}

std::vector<std::uint32_t> levelize(const Circuit& c) {
  require_full(c, "levelize");
  std::vector<std::uint32_t> lv(c.size(), 0);
  for (GateId id = 0; id < c.size(); ++id) {
    if (is_source(c.kind(id))) continue;
    std::uint32_t m = 0;
    for (GateId g : c.fanin(id)) m = std::max(m, lv[g]);
    lv[id] = m + 1;
  }
  return lv;
}

std::uint32_t depth(const Circuit& c) { return c.depth(); }
std::size_t size(const Circuit& c) { return c.size(); }

Circuit lower_thresholds(const Circuit& c) {
  if (c.metrics_only()) {
    Circuit out = c;
    bool has[2] = {false, false};
    for (GateId id = 0; id < out.size(); ++id) {
      if (out.kind(id) == GateKind::Const0) has[0] = true;
      if (out.kind(id) == GateKind::Const1) has[1] = true;
    }
    for (GateId id = 0; id < out.size(); ++id) {
      if (out.kind(id) == GateKind::Threshold) out.relabel_kind(id, GateKind::Majority);
    }
    // Padding constants; without stored edges their position is immaterial.
    for (int v = 0; v < 2; ++v) {
      if (!has[v]) out.add_const(v == 1);
    }
    return out;
  }

  Circuit out(c.options());
  std::vector<GateId> map(c.size());
  std::vector<GateId> ins;
  for (GateId id = 0; id < c.size(); ++id) {
    const GateKind k = c.kind(id);
    switch (k) {
      case GateKind::Input: map[id] = out.add_input(); break;
      case GateKind::Const0: map[id] = out.add_const(false); break;
      case GateKind::Const1: map[id] = out.add_const(true); break;
      default: {
        ins.clear();
        for (GateId g : c.fanin(id)) ins.push_back(map[g]);
        if (k == GateKind::Threshold) {
          const auto pad = majority_padding(c.threshold(id), ins.size());
          if (pad.ones) {
            const GateId one = out.add_const(true);
            ins.insert(ins.end(), pad.ones, one);
          }
          if (pad.zeros) {
            const GateId zero = out.add_const(false);
            ins.insert(ins.end(), pad.zeros, zero);
          }
          map[id] = out.add_gate(GateKind::Majority, ins);
        } else {
          map[id] = out.add_gate(k, ins, c.threshold(id));
        }
      }
    }
  }
  for (GateId o : c.outputs()) out.add_output(map[o]);
  for (const auto& [id, text] : c.labels()) out.set_label(map[id], text);
  return out;
}

std::string serialize(const Circuit& c) {
  require_full(c, "serialization");
  std::string s;
  s.reserve(c.size() * 16);
  s += "tcv1 " + std::to_string(c.inputs().size()) + " " + std::to_string(c.outputs().size()) + "\n";
  for (GateId id = 0; id < c.size(); ++id) {
    const GateKind k = c.kind(id);
    if (k == GateKind::Input) {
      s += "in " + std::to_string(id) + "\n";
      continue;
    }
    s += "g " + std::to_string(id) + " " + to_string(k);
    if (k == GateKind::Threshold) s += ":" + std::to_string(c.threshold(id));
    for (GateId g : c.fanin(id)) {
      s += ' ';
      s += std::to_string(g);
    }
    s += '\n';
  }
  std::vector<GateId> labelled;
  for (const auto& [id, _] : c.labels()) labelled.push_back(id);
  std::sort(labelled.begin(), labelled.end());
  for (GateId id : labelled) s += "lbl " + std::to_string(id) + " " + *c.label(id) + "\n";
  for (GateId o : c.outputs()) s += "out " + std::to_string(o) + "\n";
  return s;
}

namespace {

std::uint64_t parse_number(std::string_view tok, std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("line " + std::to_string(line) + ": expected a number, got '" + std::string(tok) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    const std::size_t j = i;
    while (i < s.size() && s[i] != ' ') ++i;
    if (i > j) out.push_back(s.substr(j, i - j));
  }
  return out;
}

}  // namespace

Circuit deserialize(std::string_view text, CircuitOptions opts) {
  opts.metrics_only = false;
  // Ids in the text must be reproduced exactly, so no merging on load.
  opts.dedup = false;
  Circuit c(opts);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::uint64_t want_in = 0, want_out = 0;
  bool header = false;
  std::vector<GateId> ins;
  auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError("line " + std::to_string(line_no) + ": " + msg);
  };
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto tok = split(line);
    if (tok.empty()) continue;
    if (!header) {
      if (tok.size() != 3 || tok[0] != "tcv1") throw fail("expected header 'tcv1 <inputs> <outputs>'");
      want_in = parse_number(tok[1], line_no);
      want_out = parse_number(tok[2], line_no);
      header = true;
      continue;
    }
    if (tok[0] == "in" || tok[0] == "g") {
      if (tok.size() < 2) throw fail("missing gate id");
      const auto id = parse_number(tok[1], line_no);
      if (id != c.size()) throw fail("gate id " + std::to_string(id) + " out of sequence, expected " + std::to_string(c.size()));
      if (!c.outputs().empty()) throw fail("gate after outputs");
      if (tok[0] == "in") {
        if (tok.size() != 2) throw fail("'in' takes only an id");
        c.add_input();
        continue;
      }
      if (tok.size() < 3) throw fail("missing gate kind");
      std::string_view kname = tok[2];
      std::uint32_t k = 0;
      if (const auto colon = kname.find(':'); colon != std::string_view::npos) {
        k = static_cast<std::uint32_t>(parse_number(kname.substr(colon + 1), line_no));
        kname = kname.substr(0, colon);
      }
      const auto kind = parse_kind(kname);
      if (!kind || *kind == GateKind::Input) throw fail("unknown gate kind '" + std::string(tok[2]) + "'");
      if (kind != GateKind::Threshold && tok[2].find(':') != std::string_view::npos) throw fail("only THRESHOLD takes ':k'");
      ins.clear();
      for (std::size_t i = 3; i < tok.size(); ++i) {
        const auto in = parse_number(tok[i], line_no);
        if (in >= id) throw fail("input " + std::to_string(in) + " does not precede gate " + std::to_string(id));
        ins.push_back(static_cast<GateId>(in));
      }
      if (!std::is_sorted(ins.begin(), ins.end()) && *kind != GateKind::Not) throw fail("gate inputs not in ascending order");
      try {
        c.add_gate(*kind, ins, k);
      } catch (const Error& e) {
        throw fail(e.what());
      }
    } else if (tok[0] == "lbl") {
      if (tok.size() < 3) throw fail("label needs an id and text");
      const auto id = parse_number(tok[1], line_no);
      if (id >= c.size()) throw fail("label for missing gate");
      const std::size_t text_pos = static_cast<std::size_t>(tok[2].data() - line.data());
      c.set_label(static_cast<GateId>(id), std::string(line.substr(text_pos)));
    } else if (tok[0] == "out") {
      if (tok.size() != 2) throw fail("'out' takes one id");
      const auto id = parse_number(tok[1], line_no);
      if (id >= c.size()) throw fail("output refers to missing gate " + std::to_string(id));
      c.add_output(static_cast<GateId>(id));
    } else {
      throw fail("unknown record '" + std::string(tok[0]) + "'");
    }
  }
  if (!header) throw ParseError("line 1: empty netlist");
  if (c.inputs().size() != want_in || c.outputs().size() != want_out) {
    throw ParseError("line " + std::to_string(line_no) + ": header declares " + std::to_string(want_in) + " inputs and " +
                     std::to_string(want_out) + " outputs, found " + std::to_string(c.inputs().size()) + " and " +
                     std::to_string(c.outputs().size()));
  }
  return c;
}

}  // namespace tcvar::net
