#include "tcvar/var/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tcvar/error.hpp"
#include "tcvar/fp/fp_num.hpp"

namespace tcvar::var {

using nlohmann::json;

const char* to_string(BlockKind k) {
  switch (k) {
    case BlockKind::ResNet: return "resnet";
    case BlockKind::Attention: return "attention";
    case BlockKind::UpSample: return "upsample";
  }
  return "?";
}

std::size_t ModelConfig::tokens() const {
  std::size_t n = 0;
  for (const auto& s : scales) n += s.h * s.w;
  return n;
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigError("field '" + field + "': " + msg);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where.empty() ? "<root>" : where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) fail(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& field, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(field, "wrong type");
  }
}

std::size_t get_size(const json& j, const char* key, const std::string& field, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) fail(field, "expected a non-negative integer");
  return v.get<std::size_t>();
}

Shape2 get_shape(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer() ||
      v[0].get<std::int64_t>() < 1 || v[1].get<std::int64_t>() < 1) {
    fail(field, "expected [h, w] with positive integers");
  }
  return Shape2{v[0].get<std::size_t>(), v[1].get<std::size_t>()};
}

json shape_json(Shape2 s) { return json::array({s.h, s.w}); }

}  // namespace

ModelConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "", {"p", "d", "m", "scales", "policy", "transcendental", "seed", "weights", "layer_norm", "codebook",
                     "phase2", "decoder", "max_entries"});
  ModelConfig c;
  if (j.contains("p")) {
    if (!j["p"].is_number_integer()) fail("p", "expected an integer");
    c.p = j["p"].get<int>();
  }
  c.d = get_size(j, "d", "d", c.d);
  c.m = get_size(j, "m", "m", c.m);
  if (j.contains("scales")) {
    if (!j["scales"].is_array()) fail("scales", "expected a list of [h, w]");
    c.scales.clear();
    for (std::size_t i = 0; i < j["scales"].size(); ++i) {
      c.scales.push_back(get_shape(j["scales"][i], "scales[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("policy")) {
    const auto s = get<std::string>(j, "policy", "policy", "");
    const auto pol = gad::parse_policy(s);
    if (!pol) fail("policy", "expected 'strict' or 'tree'");
    c.policy = *pol;
  }
  if (j.contains("transcendental")) {
    const auto t = gad::parse_trans_impl(get<std::string>(j, "transcendental", "transcendental", ""));
    if (!t) fail("transcendental", "expected 'auto', 'series' or 'table'");
    c.transcendental = *t;
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0)) {
      fail("seed", "expected a non-negative integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("weights")) {
    const auto w = get<std::string>(j, "weights", "weights", "");
    if (w == "random") {
      c.weights = WeightInit::Random;
    } else if (w == "identity") {
      c.weights = WeightInit::Identity;
    } else {
      fail("weights", "expected 'random' or 'identity'");
    }
  }
  if (j.contains("layer_norm")) {
    const auto& ln = j["layer_norm"];
    check_keys(ln, "layer_norm", {"pre", "post"});
    c.ln_pre = get<bool>(ln, "pre", "layer_norm.pre", c.ln_pre);
    c.ln_post = get<bool>(ln, "post", "layer_norm.post", c.ln_post);
  }
  if (j.contains("codebook")) {
    const auto& cb = j["codebook"];
    check_keys(cb, "codebook", {"rows", "dim"});
    c.c_vae = get_size(cb, "rows", "codebook.rows", c.c_vae);
    c.d_vae = get_size(cb, "dim", "codebook.dim", c.d_vae);
  }
  if (j.contains("phase2")) {
    const auto& p2 = j["phase2"];
    check_keys(p2, "phase2", {"input", "kernels", "kernel"});
    if (p2.contains("input")) {
      const auto in = get<std::string>(p2, "input", "phase2.input", "");
      if (in == "transformer") {
        c.phase2_input = Phase2Input::Transformer;
      } else if (in == "indices") {
        c.phase2_input = Phase2Input::Indices;
      } else {
        fail("phase2.input", "expected 'transformer' or 'indices'");
      }
    }
    c.phase2_kernels = get_size(p2, "kernels", "phase2.kernels", c.phase2_kernels);
    if (p2.contains("kernel")) c.phase2_kernel = get_shape(p2["kernel"], "phase2.kernel");
  }
  if (j.contains("decoder")) {
    if (!j["decoder"].is_array()) fail("decoder", "expected a list of blocks");
    for (std::size_t i = 0; i < j["decoder"].size(); ++i) {
      const auto& b = j["decoder"][i];
      const std::string f = "decoder[" + std::to_string(i) + "]";
      check_keys(b, f, {"type", "kernel", "factor"});
      BlockSpec bs;
      const auto type = get<std::string>(b, "type", f + ".type", "");
      if (type == "resnet") {
        bs.kind = BlockKind::ResNet;
      } else if (type == "attention") {
        bs.kind = BlockKind::Attention;
      } else if (type == "upsample") {
        bs.kind = BlockKind::UpSample;
      } else {
        fail(f + ".type", "expected 'resnet', 'attention' or 'upsample'");
      }
      if (b.contains("kernel")) bs.kernel = get_shape(b["kernel"], f + ".kernel");
      bs.factor = get_size(b, "factor", f + ".factor", bs.factor);
      c.decoder.push_back(bs);
    }
  }
  c.max_entries = get_size(j, "max_entries", "max_entries", c.max_entries);
  validate(c);
  return c;
}

void validate(const ModelConfig& c) {
  if (c.p < 2 || c.p > fp::kDefaultMaxPrecision) fail("p", "must lie in [2, " + std::to_string(fp::kDefaultMaxPrecision) + "]");
  if (c.d < 1) fail("d", "must be at least 1");
  if (c.m < 1 || c.m > 8) fail("m", "must lie in [1, 8]");
  if (c.scales.empty()) fail("scales", "needs at least one scale");
  const Shape2 fin = c.final_scale();
  for (std::size_t i = 0; i < c.scales.size(); ++i) {
    if (c.scales[i].h > fin.h || c.scales[i].w > fin.w) {
      fail("scales[" + std::to_string(i) + "]", "larger than the final scale; phase 2 only upsamples");
    }
  }
  const std::size_t n = c.tokens();
  auto cap = [&](std::size_t entries, const std::string& field) {
    if (entries > c.max_entries) {
      fail(field, std::to_string(entries) + " entries exceed max_entries = " + std::to_string(c.max_entries));
    }
  };
  cap(n * c.d, "scales");
  if (c.c_vae < 1) fail("codebook.rows", "must be at least 1");
  if (c.d_vae < 1) fail("codebook.dim", "must be at least 1");
  if (c.phase2_input == Phase2Input::Transformer && c.c_vae != c.d) {
    fail("codebook.rows", "must equal d when phase 2 reads transformer tokens");
  }
  if (c.phase2_kernels < 1) fail("phase2.kernels", "must be at least 1");
  auto kernel_ok = [&](Shape2 k, std::size_t ch, std::size_t h, std::size_t w, const std::string& field) {
    if (k.h > h || k.w > w) fail(field, "kernel larger than the map it is applied to");
    if (k.h * k.w * ch > n) fail(field, "kernel volume h*w*c exceeds the token count n");
  };
  kernel_ok(c.phase2_kernel, c.d_vae, fin.h, fin.w, "phase2.kernel");
  cap(fin.h * fin.w * c.d_vae, "codebook.dim");
  std::size_t h = fin.h - c.phase2_kernel.h + 1, w = fin.w - c.phase2_kernel.w + 1;
  const std::size_t ch = c.phase2_kernels;
  cap(h * w * ch, "phase2.kernels");
  for (std::size_t i = 0; i < c.decoder.size(); ++i) {
    const auto& b = c.decoder[i];
    const std::string f = "decoder[" + std::to_string(i) + "]";
    switch (b.kind) {
      case BlockKind::ResNet:
        if (!(b.kernel == Shape2{1, 1})) fail(f + ".kernel", "resnet blocks need 1x1 kernels to keep the residual shape");
        kernel_ok(b.kernel, ch, h, w, f + ".kernel");
        break;
      case BlockKind::Attention:
        break;
      case BlockKind::UpSample:
        if (b.factor < 1) fail(f + ".factor", "must be at least 1");
        h *= b.factor;
        w *= b.factor;
        cap(h * w * ch, f + ".factor");
        kernel_ok(b.kernel, ch, h, w, f + ".kernel");
        h = h - b.kernel.h + 1;
        w = w - b.kernel.w + 1;
        break;
    }
  }
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const ModelConfig& c) {
  json j;
  j["p"] = c.p;
  j["d"] = c.d;
  j["m"] = c.m;
  j["scales"] = json::array();
  for (const auto& s : c.scales) j["scales"].push_back(shape_json(s));
  j["policy"] = gad::to_string(c.policy);
  j["transcendental"] = gad::to_string(c.transcendental);
  j["seed"] = c.seed;
  j["weights"] = c.weights == WeightInit::Random ? "random" : "identity";
  j["layer_norm"] = {{"pre", c.ln_pre}, {"post", c.ln_post}};
  j["codebook"] = {{"rows", c.c_vae}, {"dim", c.d_vae}};
  j["phase2"] = {{"input", c.phase2_input == Phase2Input::Transformer ? "transformer" : "indices"},
                 {"kernels", c.phase2_kernels},
                 {"kernel", shape_json(c.phase2_kernel)}};
  j["decoder"] = json::array();
  for (const auto& b : c.decoder) {
    json jb{{"type", to_string(b.kind)}, {"kernel", shape_json(b.kernel)}};
    if (b.kind == BlockKind::UpSample) jb["factor"] = b.factor;
    j["decoder"].push_back(jb);
  }
  j["max_entries"] = c.max_entries;
  return j.dump(2);
}

}  // namespace tcvar::var
