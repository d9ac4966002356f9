#pragma once

// JSON encoding of routing instances and solutions. Unlimited vehicle limits
// are written as null.

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hazard/errors.hpp"
#include "hazard/vrpp.hpp"

namespace hazard::vrpp {

using json = nlohmann::json;

namespace detail {

inline json limit_to_json(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

inline double limit_from_json(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return kUnlimited;
  if (!it->is_number()) throw InputError(std::string("instance: vehicle ") + key + " must be a number or null");
  return it->get<double>();
}

inline Mode mode_from_string(const std::string& s) {
  if (s == "sensing") return Mode::sensing;
  if (s == "cleaning") return Mode::cleaning;
  throw InputError("instance: mode must be 'sensing' or 'cleaning'");
}

}  // namespace detail

inline json instance_to_json(const Instance& inst) {
  json vehicles = json::array();
  for (const auto& v : inst.fleet())
    vehicles.push_back({{"max_distance", detail::limit_to_json(v.max_distance)},
                        {"capacity", detail::limit_to_json(v.capacity)}});
  json nodes = json::array();
  for (const auto& n : inst.nodes())
    nodes.push_back({{"site", n.site},
                     {"x", n.position.x},
                     {"y", n.position.y},
                     {"value", n.value},
                     {"demand", n.demand},
                     {"max_visits", n.max_visits}});
  return {{"mode", to_string(inst.mode())},
          {"travel_cost", inst.travel_cost()},
          {"depot", {inst.depot().x, inst.depot().y}},
          {"vehicles", vehicles},
          {"nodes", nodes}};
}

inline Instance instance_from_json(const json& j) {
  try {
    if (!j.is_object()) throw InputError("instance: expected an object");
    const Mode mode = detail::mode_from_string(j.at("mode").get<std::string>());
    const double travel_cost = j.value("travel_cost", 1.0);
    Point depot;
    if (j.contains("depot")) {
      const auto& d = j.at("depot");
      if (!d.is_array() || d.size() != 2) throw InputError("instance: depot must be [x, y]");
      depot = {d[0].get<double>(), d[1].get<double>()};
    }
    std::vector<Vehicle> fleet;
    for (const auto& v : j.at("vehicles")) {
      if (!v.is_object()) throw InputError("instance: each vehicle must be an object");
      fleet.push_back({detail::limit_from_json(v, "max_distance"), detail::limit_from_json(v, "capacity")});
    }
    std::vector<Node> nodes;
    std::size_t next_site = 0;
    for (const auto& n : j.at("nodes")) {
      if (!n.is_object()) throw InputError("instance: each node must be an object");
      Node nd;
      nd.site = n.value("site", next_site);
      nd.position = {n.at("x").get<double>(), n.at("y").get<double>()};
      nd.value = n.at("value").get<double>();
      nd.demand = n.value("demand", 0.0);
      nd.max_visits = n.value("max_visits", 1);
      next_site = nd.site + 1;
      nodes.push_back(nd);
    }
    return Instance(mode, std::move(nodes), std::move(fleet), travel_cost, depot);
  } catch (const json::exception& e) {
    throw InputError(std::string("instance: malformed: ") + e.what());
  } catch (const ConfigError& e) {
    throw InputError(std::string("instance: ") + e.what());
  }
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("instance: cannot open '" + path + "'");
  try {
    return instance_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw InputError(std::string("instance: syntax error: ") + e.what());
  }
}

inline json solution_to_json(const Instance& inst, const Solution& sol) {
  json routes = json::array();
  json site_routes = json::array();
  for (const auto& r : sol.routes) {
    routes.push_back(r);
    json sites = json::array();
    for (std::size_t i : r) sites.push_back(inst.node(i).site);
    site_routes.push_back(sites);
  }
  return {{"objective", sol.objective}, {"routes", routes}, {"site_routes", site_routes},
          {"feasible", is_feasible(inst, sol)}};
}

inline Solution solution_from_json(const json& j) {
  try {
    Solution sol;
    sol.objective = j.at("objective").get<double>();
    sol.routes = j.at("routes").get<std::vector<Route>>();
    return sol;
  } catch (const json::exception& e) {
    throw InputError(std::string("solution: malformed: ") + e.what());
  }
}

}  // namespace hazard::vrpp
