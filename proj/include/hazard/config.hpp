#pragma once

// JSON scenario configuration: parsing with strict key checking, serialization
// and the built-in scenario presets.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "hazard/dispatch.hpp"
#include "hazard/errors.hpp"
#include "hazard/policy.hpp"

namespace hazard {

using json = nlohmann::json;

namespace detail {

class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) throw ConfigError(where() + ": expected an object", where());
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.push_back(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;
    const std::string name = qualified(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError(name + ": expected a boolean", name);
      out = it->template get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw ConfigError(name + ": expected a string", name);
      out = it->template get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError(name + ": expected a number", name);
      out = it->template get<T>();
    } else {
      static_assert(std::is_integral_v<T>);
      if (!it->is_number_integer()) throw ConfigError(name + ": expected an integer", name);
      if constexpr (std::is_unsigned_v<T>) {
        if (it->is_number_unsigned()) out = it->template get<T>();
        else if (it->template get<long long>() < 0) throw ConfigError(name + ": must be >= 0", name);
        else out = static_cast<T>(it->template get<long long>());
      } else {
        out = it->template get<T>();
      }
    }
  }

  const json* child(const char* key) {
    seen_.push_back(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string qualified(std::string_view key) const {
    return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
  }

  void reject_unknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
        const std::string name = qualified(it.key());
        throw ConfigError("unknown key '" + name + "'", name);
      }
  }

 private:
  std::string where() const { return prefix_.empty() ? "config" : prefix_; }

  const json& obj_;
  std::string prefix_;
  std::vector<std::string> seen_;
};

// Re-tag errors raised by the owning types' validators with the section path.
template <class F>
void validate_section(const char* section, F&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    const std::string key = std::string(section) + "." + e.key();
    std::string msg = e.what();
    if (msg.rfind(e.key() + ":", 0) == 0) msg = key + msg.substr(e.key().size());
    throw ConfigError(msg, key);
  }
}

}  // namespace detail

inline json env_to_json(const EnvParams& e) {
  return {{"saturation", e.saturation},   {"spatial_coeff", e.spatial_coeff}, {"spatial_unit_km", e.spatial_unit_km},
          {"growth_min", e.growth_min},   {"growth_max", e.growth_max},       {"hazard_min", e.hazard_min},
          {"hazard_max", e.hazard_max},   {"noise_std", e.noise_std},         {"map_min", e.map_min},
          {"map_max", e.map_max}};
}

inline json belief_to_json(const BeliefParams& b) {
  return {{"decay", b.decay},       {"inflation", b.inflation},   {"var_cap", b.var_cap},
          {"smoothing", b.smoothing}, {"boost", b.boost},         {"prior_mean", b.prior_mean},
          {"prior_var", b.prior_var}};
}

inline json vehicles_to_json(const VehicleParams& v) {
  return {{"max_distance", v.max_distance},
          {"capacity", v.capacity},
          {"unit_capacity", v.unit_capacity},
          {"travel_cost", v.travel_cost},
          {"cleaning_travel_cost", v.cleaning_travel_cost},
          {"kappa", v.kappa},
          {"beta", v.beta}};
}

inline json config_to_json(const ScenarioConfig& c) {
  return {{"name", c.name},
          {"num_sites", c.num_sites},
          {"num_uavs", c.num_uavs},
          {"num_ugvs", c.num_ugvs},
          {"max_rounds", c.max_rounds},
          {"strategy", std::string(to_string(c.strategy))},
          {"solver_budget", c.solver_budget},
          {"seed", c.seed},
          {"env", env_to_json(c.env)},
          {"belief", belief_to_json(c.belief)},
          {"vehicles", vehicles_to_json(c.vehicles)},
          {"cleaning",
           {{"visit_model", to_string(c.visit_model)},
            {"use_spare_capacity", c.use_spare_capacity},
            {"rebase_history", c.rebase_history_on_cleaning}}}};
}

inline std::string serialize_config(const ScenarioConfig& c) { return config_to_json(c).dump(2) + "\n"; }

// Overlay `j` onto `base`. Absent keys keep the base values.
inline ScenarioConfig config_from_json(const json& j, ScenarioConfig base = {}) {
  ScenarioConfig c = std::move(base);
  detail::ObjectReader top(j, "");
  top.read("name", c.name);
  top.read("num_sites", c.num_sites);
  top.read("num_uavs", c.num_uavs);
  top.read("num_ugvs", c.num_ugvs);
  top.read("max_rounds", c.max_rounds);
  std::string strategy(to_string(c.strategy));
  top.read("strategy", strategy);
  c.strategy = parse_strategy(strategy);
  top.read("solver_budget", c.solver_budget);
  top.read("seed", c.seed);

  if (const json* e = top.child("env")) {
    detail::ObjectReader r(*e, "env");
    r.read("saturation", c.env.saturation);
    r.read("spatial_coeff", c.env.spatial_coeff);
    r.read("spatial_unit_km", c.env.spatial_unit_km);
    r.read("growth_min", c.env.growth_min);
    r.read("growth_max", c.env.growth_max);
    r.read("hazard_min", c.env.hazard_min);
    r.read("hazard_max", c.env.hazard_max);
    r.read("noise_std", c.env.noise_std);
    r.read("map_min", c.env.map_min);
    r.read("map_max", c.env.map_max);
    r.reject_unknown();
  }
  if (const json* b = top.child("belief")) {
    detail::ObjectReader r(*b, "belief");
    r.read("decay", c.belief.decay);
    r.read("inflation", c.belief.inflation);
    r.read("var_cap", c.belief.var_cap);
    r.read("smoothing", c.belief.smoothing);
    r.read("boost", c.belief.boost);
    r.read("prior_mean", c.belief.prior_mean);
    r.read("prior_var", c.belief.prior_var);
    r.reject_unknown();
  }
  if (const json* v = top.child("vehicles")) {
    detail::ObjectReader r(*v, "vehicles");
    r.read("max_distance", c.vehicles.max_distance);
    r.read("capacity", c.vehicles.capacity);
    r.read("unit_capacity", c.vehicles.unit_capacity);
    r.read("travel_cost", c.vehicles.travel_cost);
    r.read("cleaning_travel_cost", c.vehicles.cleaning_travel_cost);
    r.read("kappa", c.vehicles.kappa);
    r.read("beta", c.vehicles.beta);
    r.reject_unknown();
  }
  if (const json* cl = top.child("cleaning")) {
    detail::ObjectReader r(*cl, "cleaning");
    std::string model = to_string(c.visit_model);
    r.read("visit_model", model);
    if (model == "tiered") c.visit_model = CleaningVisitModel::tiered;
    else if (model == "uniform") c.visit_model = CleaningVisitModel::uniform;
    else throw ConfigError("cleaning.visit_model: expected 'tiered' or 'uniform'", "cleaning.visit_model");
    r.read("use_spare_capacity", c.use_spare_capacity);
    r.read("rebase_history", c.rebase_history_on_cleaning);
    r.reject_unknown();
  }
  top.reject_unknown();

  detail::validate_section("env", [&] { c.env.validate(); });
  detail::validate_section("belief", [&] { c.effective_belief().validate(); });
  detail::validate_section("vehicles", [&] { c.vehicles.validate(); });
  c.validate();
  return c;
}

inline ScenarioConfig parse_config_text(std::string_view text, ScenarioConfig base = {}) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: syntax error: ") + e.what(), "config");
  }
  return config_from_json(j, std::move(base));
}

inline ScenarioConfig preset(std::string_view name) {
  ScenarioConfig c;
  c.name = std::string(name);
  if (name == "scenario1") {
    c.num_sites = 20, c.num_uavs = 2, c.num_ugvs = 2;
  } else if (name == "scenario2") {
    c.num_sites = 50, c.num_uavs = 2, c.num_ugvs = 2;
  } else if (name == "scenario3") {
    c.num_sites = 50, c.num_uavs = 2, c.num_ugvs = 3;
  } else {
    throw ConfigError("preset: unknown preset '" + std::string(name) + "' (expected scenario1, scenario2 or scenario3)",
                      "preset");
  }
  return c;
}

inline ScenarioConfig parse_config(const std::string& path, ScenarioConfig base = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'", "config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

}  // namespace hazard
