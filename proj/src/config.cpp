#include "modalctl/config.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

namespace modalctl {

namespace {

using nlohmann::json;

// Tracks which keys of an object were consumed; leftovers are config errors.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ConfigError("config: " + path_ + " must be an object");
    }
  }

  const json* optional(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = optional(key);
    if (v == nullptr) {
      throw ConfigError("config: missing required field " + path_ + "." + key);
    }
    return *v;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) {
        throw ConfigError("config: unknown field " + path_ + "." + key);
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) {
    throw ConfigError("config: " + where + " must be a number");
  }
  return j.get<double>();
}

std::size_t get_count(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) {
    return j.get<std::size_t>();
  }
  if (j.is_number_integer() && j.get<long long>() >= 0) {
    return static_cast<std::size_t>(j.get<long long>());
  }
  throw ConfigError("config: " + where + " must be a nonnegative integer");
}

std::vector<double> get_number_list(const json& j, const std::string& where) {
  if (!j.is_array()) {
    throw ConfigError("config: " + where + " must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    out.push_back(get_number(v, where + " entry"));
  }
  return out;
}

StateVector get_sparse_state(const json& j, const std::string& where) {
  if (!j.is_array()) {
    throw ConfigError("config: " + where + " must be an array of [index, value] pairs");
  }
  StateVector out;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2) {
      throw ConfigError("config: " + where + " entries must be [index, value] pairs");
    }
    const std::size_t index = get_count(pair[0], where + " index");
    const double value = get_number(pair[1], where + " value");
    out.set(index, out.at(index) + value);
  }
  return out;
}

FrequencyPreset parse_preset(const json& j) {
  StrictObject obj(j, "system.preset");
  FrequencyPreset preset;
  const std::string kind = obj.require("kind").get<std::string>();
  if (kind == "euler_bernoulli") {
    preset.kind = FrequencyPreset::Kind::euler_bernoulli;
  } else if (kind == "harmonic") {
    preset.kind = FrequencyPreset::Kind::harmonic;
  } else if (kind == "explicit") {
    preset.kind = FrequencyPreset::Kind::explicit_list;
  } else {
    throw ConfigError("config: system.preset.kind must be euler_bernoulli, harmonic, or explicit");
  }

  if (preset.kind == FrequencyPreset::Kind::explicit_list) {
    preset.omega = get_number_list(obj.require("omega"), "system.preset.omega");
    preset.b = get_number_list(obj.require("b"), "system.preset.b");
    if (preset.omega.size() != preset.b.size()) {
      throw ConfigError("config: system.preset omega and b must have equal length");
    }
  } else {
    if (const json* scale = obj.optional("scale")) {
      preset.scale = get_number(*scale, "system.preset.scale");
    }
    if (const json* b_list = obj.optional("b")) {
      preset.b = get_number_list(*b_list, "system.preset.b");
    }
    if (const json* b_rule = obj.optional("b_rule")) {
      StrictObject rule(*b_rule, "system.preset.b_rule");
      preset.beta = get_number(rule.require("beta"), "system.preset.b_rule.beta");
      preset.p = get_number(rule.require("p"), "system.preset.b_rule.p");
      rule.finish();
    }
  }
  obj.finish();
  return preset;
}

json emit_preset(const FrequencyPreset& preset) {
  json j;
  switch (preset.kind) {
    case FrequencyPreset::Kind::euler_bernoulli:
      j["kind"] = "euler_bernoulli";
      break;
    case FrequencyPreset::Kind::harmonic:
      j["kind"] = "harmonic";
      break;
    case FrequencyPreset::Kind::explicit_list:
      j["kind"] = "explicit";
      j["omega"] = preset.omega;
      j["b"] = preset.b;
      return j;
  }
  j["scale"] = preset.scale;
  if (!preset.b.empty()) {
    j["b"] = preset.b;
  } else {
    j["b_rule"] = {{"beta", preset.beta}, {"p", preset.p}};
  }
  return j;
}

json emit_sparse_state(const StateVector& x) {
  json j = json::array();
  for (const auto& [index, value] : x.entries()) {
    j.push_back(json::array({index, value}));
  }
  return j;
}

}  // namespace

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.kappa == b.kappa && a.mode_count == b.mode_count &&
         a.preset.kind == b.preset.kind && a.preset.scale == b.preset.scale &&
         a.preset.beta == b.preset.beta && a.preset.p == b.preset.p &&
         a.preset.omega == b.preset.omega && a.preset.b == b.preset.b &&
         a.allow_overdamped == b.allow_overdamped && a.tau == b.tau &&
         a.weight_q == b.weight_q && a.N == b.N && a.N_range == b.N_range && a.M == b.M &&
         a.x0 == b.x0 && a.x1 == b.x1 && a.epsilon_target == b.epsilon_target &&
         a.gram_panels == b.gram_panels && a.gram_nodes == b.gram_nodes &&
         a.prop_steps == b.prop_steps && a.prop_nodes == b.prop_nodes &&
         a.samples == b.samples && a.ridge == b.ridge;
}

ExperimentConfig config_from_json(const json& j) {
  StrictObject root(j, "config");
  ExperimentConfig config;

  {
    StrictObject sys(root.require("system"), "system");
    config.kappa = get_number(sys.require("kappa"), "system.kappa");
    config.mode_count = get_count(sys.require("mode_count"), "system.mode_count");
    config.preset = parse_preset(sys.require("preset"));
    if (const json* flag = sys.optional("allow_overdamped")) {
      if (!flag->is_boolean()) {
        throw ConfigError("config: system.allow_overdamped must be a boolean");
      }
      config.allow_overdamped = flag->get<bool>();
    }
    sys.finish();
  }

  if (const json* tau = root.optional("tau")) {
    config.tau = get_number(*tau, "tau");
  }
  if (!(config.tau > 0.0) || !std::isfinite(config.tau)) {
    throw ConfigError("config: tau must be positive and finite");
  }
  if (const json* q = root.optional("weight_q")) {
    config.weight_q = get_number(*q, "weight_q");
    if (!(config.weight_q > 0.0)) {
      throw ConfigError("config: weight_q must be positive");
    }
  }

  const json* n_single = root.optional("N");
  const json* n_range = root.optional("N_range");
  if (n_single != nullptr && n_range != nullptr) {
    throw ConfigError("config: give either N or N_range, not both");
  }
  if (n_single != nullptr) {
    config.N = get_count(*n_single, "N");
  }
  if (n_range != nullptr) {
    if (!n_range->is_array() || n_range->size() != 2) {
      throw ConfigError("config: N_range must be [first, last]");
    }
    const std::size_t first = get_count((*n_range)[0], "N_range first");
    const std::size_t last = get_count((*n_range)[1], "N_range last");
    if (first > last) {
      throw ConfigError("config: N_range first must not exceed last");
    }
    config.N_range = {first, last};
  }

  config.M = config.mode_count;
  if (const json* m = root.optional("M")) {
    config.M = get_count(*m, "M");
  }
  if (config.M > config.mode_count) {
    throw ConfigError("config: M must not exceed system.mode_count");
  }
  const std::size_t design_max =
      config.N_range ? config.N_range->second : config.N.value_or(0);
  if (design_max > config.M) {
    throw ConfigError("config: truncation order N must not exceed M");
  }

  if (const json* x0 = root.optional("x0")) {
    config.x0 = get_sparse_state(*x0, "x0");
  }
  if (const json* x1 = root.optional("x1")) {
    config.x1 = get_sparse_state(*x1, "x1");
  }
  const std::size_t max_state_index = 2 * config.M + 1;
  for (const StateVector* x : {&config.x0, &config.x1}) {
    if (!x->empty() && x->max_index() > max_state_index) {
      throw ConfigError("config: x0/x1 indices must not exceed 2M+1");
    }
  }

  if (const json* eps = root.optional("epsilon_target")) {
    config.epsilon_target = get_number(*eps, "epsilon_target");
    if (!(config.epsilon_target > 0.0)) {
      throw ConfigError("config: epsilon_target must be positive");
    }
  }

  if (const json* quad = root.optional("gramian")) {
    StrictObject g(*quad, "gramian");
    config.gram_panels = get_count(g.require("panels"), "gramian.panels");
    config.gram_nodes = get_count(g.require("nodes"), "gramian.nodes");
    g.finish();
  }
  if (const json* quad = root.optional("propagation")) {
    StrictObject p(*quad, "propagation");
    config.prop_steps = get_count(p.require("steps"), "propagation.steps");
    config.prop_nodes = get_count(p.require("nodes"), "propagation.nodes");
    p.finish();
  }
  if (const json* samples = root.optional("samples")) {
    config.samples = get_count(*samples, "samples");
    if (config.samples < 1) {
      throw ConfigError("config: samples must be at least 1");
    }
  }
  if (const json* ridge = root.optional("ridge")) {
    config.ridge = get_number(*ridge, "ridge");
    if (config.ridge < 0.0) {
      throw ConfigError("config: ridge must be nonnegative");
    }
  }
  root.finish();
  return config;
}

json config_to_json(const ExperimentConfig& config) {
  json j;
  j["system"] = {{"kappa", config.kappa},
                 {"mode_count", config.mode_count},
                 {"preset", emit_preset(config.preset)},
                 {"allow_overdamped", config.allow_overdamped}};
  j["tau"] = config.tau;
  j["weight_q"] = config.weight_q;
  if (config.N) {
    j["N"] = *config.N;
  }
  if (config.N_range) {
    j["N_range"] = {config.N_range->first, config.N_range->second};
  }
  j["M"] = config.M;
  j["x0"] = emit_sparse_state(config.x0);
  j["x1"] = emit_sparse_state(config.x1);
  j["epsilon_target"] = config.epsilon_target;
  j["gramian"] = {{"panels", config.gram_panels}, {"nodes", config.gram_nodes}};
  j["propagation"] = {{"steps", config.prop_steps}, {"nodes", config.prop_nodes}};
  j["samples"] = config.samples;
  j["ridge"] = config.ridge;
  return j;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

ModalSystem build_from_config(const ExperimentConfig& config) {
  return build_system(config.preset, config.mode_count, config.kappa, config.allow_overdamped);
}

}  // namespace modalctl
