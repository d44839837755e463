#include "delayflock/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "delayflock/errors.hpp"

namespace delayflock {

using nlohmann::json;

namespace {

// Maps dotted key paths ("model.potential.beta", "initial.x0[1]") to the line
// on which their value starts. Runs only on text nlohmann already accepted.
class LineIndex {
 public:
  explicit LineIndex(std::string_view text) : s_(text) {
    skip_ws();
    value("");
  }

  int line_of(std::string path) const {
    for (;;) {
      if (const auto it = lines_.find(path); it != lines_.end()) return it->second;
      const auto cut = path.find_last_of(".[");
      if (cut == std::string::npos) return path.empty() ? 1 : line_of("");
      path.resize(cut);
    }
  }

 private:
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  std::string string() {
    std::string out;
    ++i_;  // opening quote
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') ++i_;
      if (i_ < s_.size()) out += s_[i_++];
    }
    ++i_;
    return out;
  }

  void value(const std::string& path) {
    lines_.emplace(path, line_);
    if (i_ >= s_.size()) return;
    const char ch = s_[i_];
    if (ch == '{') {
      ++i_;
      skip_ws();
      while (i_ < s_.size() && s_[i_] != '}') {
        const std::string key = string();
        skip_ws();
        ++i_;  // ':'
        skip_ws();
        value(path.empty() ? key : path + "." + key);
        skip_ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        skip_ws();
      }
      ++i_;
    } else if (ch == '[') {
      ++i_;
      skip_ws();
      for (std::size_t k = 0; i_ < s_.size() && s_[i_] != ']'; ++k) {
        value(path + "[" + std::to_string(k) + "]");
        skip_ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
        skip_ws();
      }
      ++i_;
    } else if (ch == '"') {
      string();
    } else {
      while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != '}' && s_[i_] != ']' &&
             !std::isspace(static_cast<unsigned char>(s_[i_])))
        ++i_;
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

class Reader {
 public:
  Reader(std::string_view text, std::string_view source) : index_(text), source_(source) {}

  [[noreturn]] void fail(const std::string& path, const std::string& reason) const {
    std::ostringstream msg;
    msg << source_ << ":" << index_.line_of(path) << ": " << (path.empty() ? "<root>" : path)
        << ": " << reason;
    throw ConfigError(msg.str());
  }

  // Re-raises a validation error with the location of the path named at the
  // front of its message ("delay: ...", "initial.samples: ...").
  [[noreturn]] void relocate(const ConfigError& e, const std::string& fallback) const {
    const std::string what = e.what();
    if (what.starts_with(source_ + ":")) throw e;
    const auto colon = what.find(": ");
    std::string path = fallback;
    std::string reason = what;
    if (colon != std::string::npos &&
        what.find_first_of(" \t") >= colon) {  // leading token has no spaces
      path = what.substr(0, colon);
      reason = what.substr(colon + 2);
      if (path == "potential") path = "model.potential";
    }
    fail(path, reason);
  }

  const json& object(const json& parent, const std::string& path,
                     std::initializer_list<const char*> allowed) const {
    const json& node = at(parent, path);
    check_object(node, path, allowed);
    return node;
  }

  void check_object(const json& node, const std::string& path,
                    std::initializer_list<const char*> allowed) const {
    if (!node.is_object()) fail(path, "expected an object");
    for (const auto& item : node.items()) {
      bool known = false;
      for (const char* key : allowed) known = known || item.key() == key;
      if (!known) fail(join(path, item.key()), "unknown key");
    }
  }

  const json& at(const json& parent, const std::string& path) const {
    const std::string key = leaf(path);
    if (!parent.contains(key)) fail(path, "missing required key");
    return parent.at(key);
  }

  double number(const json& node, const std::string& path) const {
    if (!node.is_number()) fail(path, "expected a number");
    return node.get<double>();
  }

  double number(const json& parent, const std::string& path, double fallback) const {
    const std::string key = leaf(path);
    return parent.contains(key) ? number(parent.at(key), path) : fallback;
  }

  std::size_t count(const json& node, const std::string& path) const {
    if (node.is_number_unsigned()) return node.get<std::size_t>();
    if (node.is_number_integer()) fail(path, "expected a nonnegative integer");
    if (node.is_number_float()) {
      const double value = node.get<double>();
      if (value >= 0.0 && std::floor(value) == value && value < 1e15)
        return static_cast<std::size_t>(value);
    }
    fail(path, "expected a nonnegative integer");
  }

  std::string text(const json& node, const std::string& path) const {
    if (!node.is_string()) fail(path, "expected a string");
    return node.get<std::string>();
  }

  Matrix matrix(const json& node, const std::string& path, std::size_t n, std::size_t d) const {
    if (!node.is_array()) fail(path, "expected a list of " + std::to_string(n) + " rows");
    if (node.size() != n)
      fail(path, "expected " + std::to_string(n) + " rows, got " + std::to_string(node.size()));
    Matrix m(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string row_path = path + "[" + std::to_string(i) + "]";
      const json& row = node[i];
      if (!row.is_array() || row.size() != d)
        fail(row_path, "expected a row of " + std::to_string(d) + " numbers");
      for (std::size_t k = 0; k < d; ++k)
        m(i, k) = number(row[k], row_path + "[" + std::to_string(k) + "]");
    }
    return m;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  static std::string leaf(const std::string& path) {
    const auto dot = path.rfind('.');
    return dot == std::string::npos ? path : path.substr(dot + 1);
  }

  LineIndex index_;
  std::string source_;
};

Potential read_potential(const Reader& r, const json& model) {
  const json& node = r.object(model, "model.potential", {"kind", "beta", "psi0", "samples"});
  const std::string kind = r.text(r.at(node, "model.potential.kind"), "model.potential.kind");
  const auto only = [&](const char* key) {
    for (const char* other : {"beta", "psi0", "samples"})
      if (std::string_view(other) != key && node.contains(other))
        r.fail(std::string("model.potential.") + other, "not allowed for kind '" + kind + "'");
  };
  try {
    if (kind == "cucker_smale") {
      only("beta");
      return Potential::cucker_smale(
          r.number(r.at(node, "model.potential.beta"), "model.potential.beta"));
    }
    if (kind == "constant") {
      only("psi0");
      return Potential::constant(
          r.number(r.at(node, "model.potential.psi0"), "model.potential.psi0"));
    }
    if (kind == "table") {
      only("samples");
      const json& samples = r.at(node, "model.potential.samples");
      if (!samples.is_array()) r.fail("model.potential.samples", "expected a list of pairs");
      std::vector<std::pair<double, double>> pairs;
      for (std::size_t k = 0; k < samples.size(); ++k) {
        const std::string path = "model.potential.samples[" + std::to_string(k) + "]";
        const json& pair = samples[k];
        if (!pair.is_array() || pair.size() != 2) r.fail(path, "expected [distance, weight]");
        pairs.emplace_back(r.number(pair[0], path + "[0]"), r.number(pair[1], path + "[1]"));
      }
      return Potential::table(std::move(pairs));
    }
  } catch (const ConfigError& e) {
    r.relocate(e, "model.potential");
  }
  r.fail("model.potential.kind",
         "unknown potential kind '" + kind + "' (cucker_smale, constant, table)");
}

ModelParams read_model(const Reader& r, const json& root) {
  const json& node = r.object(root, "model", {"n", "d", "lambda", "variant", "potential"});
  ModelParams p;
  p.n = r.count(r.at(node, "model.n"), "model.n");
  p.d = r.count(r.at(node, "model.d"), "model.d");
  p.lambda = r.number(r.at(node, "model.lambda"), "model.lambda");
  if (node.contains("variant")) {
    try {
      p.variant = model_variant_from_string(r.text(node.at("variant"), "model.variant"));
    } catch (const ConfigError& e) {
      r.fail("model.variant", e.what());
    }
  }
  p.potential = read_potential(r, node);
  try {
    p.validate();
  } catch (const ConfigError& e) {
    r.relocate(e, "model");
  }
  return p;
}

DelaySpec read_delay(const Reader& r, const json& root) {
  const json& node = r.object(root, "delay", {"kind", "tau", "a", "b", "omega"});
  const std::string kind = r.text(r.at(node, "delay.kind"), "delay.kind");
  try {
    if (kind == "constant") {
      for (const char* key : {"a", "b", "omega"})
        if (node.contains(key))
          r.fail(std::string("delay.") + key, "not allowed for a constant delay");
      return DelaySpec::constant(r.number(r.at(node, "delay.tau"), "delay.tau"));
    }
    if (kind == "sinusoidal") {
      if (node.contains("tau")) r.fail("delay.tau", "not allowed for a sinusoidal delay");
      return DelaySpec::sinusoidal(r.number(r.at(node, "delay.a"), "delay.a"),
                                   r.number(r.at(node, "delay.b"), "delay.b"),
                                   r.number(r.at(node, "delay.omega"), "delay.omega"));
    }
  } catch (const ConfigError& e) {
    r.relocate(e, "delay");
  }
  r.fail("delay.kind", "unknown delay kind '" + kind + "' (constant, sinusoidal)");
}

InitialHistory read_initial(const Reader& r, const json& root, const ModelParams& p) {
  const json& node = r.at(root, "initial");
  if (!node.is_object()) r.fail("initial", "expected an object");
  const std::string mode = r.text(r.at(node, "initial.mode"), "initial.mode");
  if (mode == "ballistic") {
    r.check_object(node, "initial", {"mode", "x0", "v0"});
    return BallisticHistory{r.matrix(r.at(node, "initial.x0"), "initial.x0", p.n, p.d),
                            r.matrix(r.at(node, "initial.v0"), "initial.v0", p.n, p.d)};
  }
  if (mode == "explicit") {
    r.check_object(node, "initial", {"mode", "samples"});
    const json& samples = r.at(node, "initial.samples");
    if (!samples.is_array()) r.fail("initial.samples", "expected a list of samples");
    ExplicitHistory history;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const std::string path = "initial.samples[" + std::to_string(k) + "]";
      r.check_object(samples[k], path, {"t", "x", "v"});
      ExplicitSample s;
      s.t = r.number(r.at(samples[k], path + ".t"), path + ".t");
      s.x = r.matrix(r.at(samples[k], path + ".x"), path + ".x", p.n, p.d);
      s.v = r.matrix(r.at(samples[k], path + ".v"), path + ".v", p.n, p.d);
      history.samples.push_back(std::move(s));
    }
    return history;
  }
  r.fail("initial.mode", "unknown mode '" + mode + "' (ballistic, explicit)");
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (const double value : m.row(i)) row.push_back(value);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ScenarioConfig parse_config_text(std::string_view text, std::string_view source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  const Reader r(text, source);
  r.check_object(root, "", {"model", "delay", "initial", "integration", "criteria"});

  ScenarioConfig config;
  Scenario& s = config.scenario;
  s.params = read_model(r, root);
  s.delay = read_delay(r, root);
  s.initial = read_initial(r, root, s.params);

  const json& integration = r.object(root, "integration", {"h", "t_end", "sample_stride"});
  s.h = r.number(r.at(integration, "integration.h"), "integration.h");
  s.t_end = r.number(r.at(integration, "integration.t_end"), "integration.t_end");
  if (integration.contains("sample_stride"))
    s.sample_stride = r.count(integration.at("sample_stride"), "integration.sample_stride");
  try {
    s.validate();
  } catch (const ConfigError& e) {
    r.relocate(e, "integration");
  }

  ConsensusCriteria& c = config.criteria;
  if (root.contains("criteria")) {
    const json& node = r.object(root, "criteria", {"eps_v", "x_growth_factor", "t_end", "h"});
    c.eps_v = r.number(node, "criteria.eps_v", c.eps_v);
    c.x_growth_factor = r.number(node, "criteria.x_growth_factor", c.x_growth_factor);
    c.t_end = r.number(node, "criteria.t_end", c.t_end);
    c.h = r.number(node, "criteria.h", s.h);
  } else {
    c.h = s.h;
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    r.relocate(e, "criteria");
  }
  return config;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

std::string serialize_config(const ScenarioConfig& config) {
  const Scenario& s = config.scenario;
  const ModelParams& p = s.params;

  json potential;
  potential["kind"] = std::string(to_string(p.potential.kind()));
  switch (p.potential.kind()) {
    case PotentialKind::cucker_smale:
      potential["beta"] = p.potential.beta();
      break;
    case PotentialKind::constant:
      potential["psi0"] = p.potential.psi0();
      break;
    case PotentialKind::table: {
      json samples = json::array();
      for (const auto& [dist, weight] : p.potential.samples()) samples.push_back({dist, weight});
      potential["samples"] = std::move(samples);
      break;
    }
  }

  json delay;
  if (s.delay.kind() == DelayKind::constant) {
    delay = {{"kind", "constant"}, {"tau", s.delay.a()}};
  } else {
    delay = {{"kind", "sinusoidal"}, {"a", s.delay.a()}, {"b", s.delay.b()}, {"omega", s.delay.omega()}};
  }

  json initial;
  if (const auto* ballistic = std::get_if<BallisticHistory>(&s.initial)) {
    initial = {{"mode", "ballistic"}, {"x0", matrix_json(ballistic->x0)},
               {"v0", matrix_json(ballistic->v0)}};
  } else {
    json samples = json::array();
    for (const ExplicitSample& sample : std::get<ExplicitHistory>(s.initial).samples)
      samples.push_back({{"t", sample.t}, {"x", matrix_json(sample.x)}, {"v", matrix_json(sample.v)}});
    initial = {{"mode", "explicit"}, {"samples", std::move(samples)}};
  }

  const json root = {
      {"model",
       {{"n", p.n},
        {"d", p.d},
        {"lambda", p.lambda},
        {"variant", std::string(to_string(p.variant))},
        {"potential", potential}}},
      {"delay", delay},
      {"initial", initial},
      {"integration", {{"h", s.h}, {"t_end", s.t_end}, {"sample_stride", s.sample_stride}}},
      {"criteria",
       {{"eps_v", config.criteria.eps_v},
        {"x_growth_factor", config.criteria.x_growth_factor},
        {"t_end", config.criteria.t_end},
        {"h", config.criteria.h}}},
  };
  return root.dump(2) + "\n";
}

}  // namespace delayflock
