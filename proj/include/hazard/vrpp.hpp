#pragma once

// Vehicle routing problem with profits: instance/solution model, objective and
// feasibility checking shared by the exact and heuristic solvers.
//
// Every route is an ordered node list that implicitly leaves from and returns
// to the depot, so each route is a single depot-anchored cycle by
// construction. The per-vehicle MTZ ordering variables are simply the
// positions in that list.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hazard/env.hpp"
#include "hazard/errors.hpp"
#include "hazard/geometry.hpp"

namespace hazard::vrpp {

inline constexpr double kUnlimited = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTolerance = 1e-9;

enum class Mode { sensing, cleaning };

inline const char* to_string(Mode m) { return m == Mode::sensing ? "sensing" : "cleaning"; }

struct Vehicle {
  double max_distance = kUnlimited;  // D_m
  double capacity = kUnlimited;      // Q_m

  friend bool operator==(const Vehicle&, const Vehicle&) = default;
};

// Several nodes may share a site (one per visit slot); a route stops at each
// site at most once.
struct Node {
  std::size_t site = 0;  // caller's site id
  Point position;
  double value = 0.0;    // pi_i, collected per visit
  double demand = 0.0;   // delta_i, consumed per visit (cleaning)
  int max_visits = 1;    // number of distinct vehicles that may visit

  friend bool operator==(const Node&, const Node&) = default;
};

class Instance {
 public:
  Instance() = default;

  Instance(Mode mode, std::vector<Node> nodes, std::vector<Vehicle> fleet, double travel_cost, Point depot = {})
      : mode_(mode), nodes_(std::move(nodes)), fleet_(std::move(fleet)), travel_cost_(travel_cost), depot_(depot) {
    if (fleet_.empty()) throw ConfigError("fleet: at least one vehicle is required", "fleet");
    if (!(travel_cost_ >= 0.0) || !std::isfinite(travel_cost_))
      throw InputError("travel_cost must be finite and >= 0");
    for (auto& v : fleet_) {
      if (mode_ == Mode::sensing) v.capacity = kUnlimited;
      else v.max_distance = kUnlimited;
      if (!(v.max_distance >= 0.0) || !(v.capacity >= 0.0)) throw InputError("vehicle limits must be >= 0");
    }
    const int fleet_size = static_cast<int>(fleet_.size());
    for (auto& nd : nodes_) {
      if (!std::isfinite(nd.value) || nd.value < 0.0) throw InputError("node values must be finite and >= 0");
      if (!std::isfinite(nd.demand) || nd.demand < 0.0) throw InputError("node demands must be finite and >= 0");
      if (!std::isfinite(nd.position.x) || !std::isfinite(nd.position.y))
        throw InputError("node positions must be finite");
      if (mode_ == Mode::sensing) {
        nd.demand = 0.0;
        nd.max_visits = 1;
      } else {
        nd.max_visits = std::clamp(nd.max_visits, 1, fleet_size);
      }
    }
    group_.resize(nodes_.size());
    std::vector<std::size_t> seen_sites;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto it = std::find(seen_sites.begin(), seen_sites.end(), nodes_[i].site);
      group_[i] = static_cast<std::size_t>(it - seen_sites.begin());
      if (it == seen_sites.end()) seen_sites.push_back(nodes_[i].site);
    }
    num_groups_ = seen_sites.size();
    const std::size_t m = nodes_.size() + 1;
    dist_.assign(m * m, 0.0);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b) {
        const double d = distance(point(a), point(b));
        dist_[a * m + b] = d;
        dist_[b * m + a] = d;
      }
  }

  Mode mode() const noexcept { return mode_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Vehicle>& fleet() const noexcept { return fleet_; }
  double travel_cost() const noexcept { return travel_cost_; }
  Point depot() const noexcept { return depot_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  // Dense index of the node's site among the instance's distinct sites.
  std::size_t group(std::size_t i) const { return group_[i]; }
  std::size_t num_groups() const noexcept { return num_groups_; }

  // Distance between graph vertices: 0 is the depot, node i is vertex i + 1.
  double vertex_distance(std::size_t a, std::size_t b) const noexcept { return dist_[a * (nodes_.size() + 1) + b]; }

 private:
  Point point(std::size_t vertex) const { return vertex == 0 ? depot_ : nodes_[vertex - 1].position; }

  Mode mode_ = Mode::sensing;
  std::vector<Node> nodes_;
  std::vector<Vehicle> fleet_;
  double travel_cost_ = 1.0;
  Point depot_;
  std::vector<double> dist_;
  std::vector<std::size_t> group_;
  std::size_t num_groups_ = 0;
};

using Route = std::vector<std::size_t>;

struct Solution {
  std::vector<Route> routes;  // one per vehicle, node indices into the instance
  double objective = 0.0;

  friend bool operator==(const Solution&, const Solution&) = default;
};

inline Solution empty_solution(const Instance& inst) { return {std::vector<Route>(inst.fleet().size()), 0.0}; }

// Length of depot -> route... -> depot; zero for an empty route.
inline double route_length(const Instance& inst, std::span<const std::size_t> route) {
  if (route.empty()) return 0.0;
  double len = 0.0;
  std::size_t prev = 0;
  for (std::size_t i : route) {
    if (i >= inst.size()) throw InputError("route references unknown node " + std::to_string(i));
    len += inst.vertex_distance(prev, i + 1);
    prev = i + 1;
  }
  return len + inst.vertex_distance(prev, 0);
}

inline double route_load(const Instance& inst, std::span<const std::size_t> route) {
  double load = 0.0;
  for (std::size_t i : route) load += inst.node(i).demand;
  return load;
}

inline double objective_value(const Instance& inst, const Solution& sol) {
  double value = 0.0, length = 0.0;
  for (const auto& r : sol.routes) {
    for (std::size_t i : r) {
      if (i >= inst.size()) throw InputError("solution references unknown node " + std::to_string(i));
      value += inst.node(i).value;
    }
    length += route_length(inst, r);
  }
  return value - inst.travel_cost() * length;
}

enum class ViolationKind {
  route_count,
  unknown_node,
  repeated_in_route,
  visited_by_multiple_vehicles,
  visit_cap_exceeded,
  distance_budget,
  capacity,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::route_count: return "route_count";
    case ViolationKind::unknown_node: return "unknown_node";
    case ViolationKind::repeated_in_route: return "repeated_in_route";
    case ViolationKind::visited_by_multiple_vehicles: return "visited_by_multiple_vehicles";
    case ViolationKind::visit_cap_exceeded: return "visit_cap_exceeded";
    case ViolationKind::distance_budget: return "distance_budget";
    case ViolationKind::capacity: return "capacity";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::size_t vehicle = 0;
  std::size_t node = 0;
  std::string detail;
};

inline std::vector<Violation> validate_solution(const Instance& inst, const Solution& sol) {
  std::vector<Violation> out;
  if (sol.routes.size() != inst.fleet().size()) {
    out.push_back({ViolationKind::route_count, 0, 0,
                   "expected " + std::to_string(inst.fleet().size()) + " routes, got " +
                       std::to_string(sol.routes.size())});
    return out;
  }
  std::vector<int> visits(inst.size(), 0);
  for (std::size_t m = 0; m < sol.routes.size(); ++m) {
    const auto& r = sol.routes[m];
    std::vector<bool> seen(inst.num_groups(), false);
    bool structurally_ok = true;
    for (std::size_t i : r) {
      if (i >= inst.size()) {
        out.push_back({ViolationKind::unknown_node, m, i, "node index out of range"});
        structurally_ok = false;
        continue;
      }
      if (seen[inst.group(i)])
        out.push_back({ViolationKind::repeated_in_route, m, i, "site appears twice in one route"});
      seen[inst.group(i)] = true;
      ++visits[i];
    }
    if (!structurally_ok) continue;
    const auto& v = inst.fleet()[m];
    const double len = route_length(inst, r);
    if (len > v.max_distance + kFeasibilityTolerance)
      out.push_back({ViolationKind::distance_budget, m, 0,
                     "route length " + std::to_string(len) + " exceeds " + std::to_string(v.max_distance)});
    const double load = route_load(inst, r);
    if (load > v.capacity + kFeasibilityTolerance)
      out.push_back({ViolationKind::capacity, m, 0,
                     "route load " + std::to_string(load) + " exceeds " + std::to_string(v.capacity)});
  }
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (inst.mode() == Mode::sensing && visits[i] > 1)
      out.push_back({ViolationKind::visited_by_multiple_vehicles, 0, i, "sensing node visited more than once"});
    else if (visits[i] > inst.node(i).max_visits)
      out.push_back({ViolationKind::visit_cap_exceeded, 0, i, "node visited more often than its cap"});
  }
  return out;
}

inline bool is_feasible(const Instance& inst, const Solution& sol) { return validate_solution(inst, sol).empty(); }

struct FleetConfig {
  std::size_t count = 0;
  double max_distance = kUnlimited;
  double capacity = kUnlimited;
};

// Assemble an instance from per-site values. Sites with value <= 0 are left
// out. `demands` and `max_visits` may be empty (zero demand, single visit).
inline Instance build_instance(Mode mode, std::span<const double> values, std::span<const double> demands,
                               std::span<const int> max_visits, std::span<const SiteGeometry> sites,
                               const FleetConfig& fleet, double travel_cost) {
  if (fleet.count == 0) throw ConfigError("fleet: at least one vehicle is required", "fleet");
  if (values.size() != sites.size() || (!demands.empty() && demands.size() != sites.size()) ||
      (!max_visits.empty() && max_visits.size() != sites.size()))
    throw InputError("build_instance: per-site arrays must match the site count");
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) throw InputError("build_instance: values must be finite and >= 0");
    if (!(values[i] > 0.0)) continue;
    Node nd;
    nd.site = sites[i].id;
    nd.position = sites[i].position;
    nd.value = values[i];
    nd.demand = demands.empty() ? 0.0 : demands[i];
    nd.max_visits = max_visits.empty() ? 1 : max_visits[i];
    nodes.push_back(nd);
  }
  std::vector<Vehicle> vehicles(fleet.count, Vehicle{fleet.max_distance, fleet.capacity});
  return Instance(mode, std::move(nodes), std::move(vehicles), travel_cost);
}

// Objective comparison with a scale-aware tolerance.
inline bool objective_better(double a, double b) { return a > b + 1e-9 * std::max(1.0, std::abs(b)); }
inline bool objective_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace hazard::vrpp
