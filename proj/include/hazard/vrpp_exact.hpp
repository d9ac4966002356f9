#pragma once

// Exhaustive VRPP solver for small instances. Used as the reference the
// heuristic is checked against.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "hazard/vrpp.hpp"

namespace hazard::vrpp {

inline constexpr std::size_t kDefaultExactSiteLimit = 8;

namespace detail {

struct SubsetTour {
  double length = 0.0;
  double value = 0.0;
  double load = 0.0;
  int count = 0;
  bool valid = true;  // false when two nodes share a site
  Route order;
};

// Shortest depot-anchored ordering of every node subset. Permutations are
// visited in lexicographic order and only strict improvements replace the
// incumbent, so ties resolve to the lexicographically smallest order.
inline std::vector<SubsetTour> enumerate_subset_tours(const Instance& inst) {
  const std::size_t n = inst.size();
  const std::size_t masks = std::size_t{1} << n;
  std::vector<SubsetTour> tours(masks);
  Route perm;
  for (std::size_t mask = 1; mask < masks; ++mask) {
    perm.clear();
    SubsetTour& t = tours[mask];
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) {
        perm.push_back(i);
        t.value += inst.node(i).value;
        t.load += inst.node(i).demand;
      }
    t.count = static_cast<int>(perm.size());
    t.length = kUnlimited;
    std::vector<bool> used(inst.num_groups(), false);
    for (std::size_t i : perm) {
      if (used[inst.group(i)]) t.valid = false;
      used[inst.group(i)] = true;
    }
    if (!t.valid) continue;
    do {
      const double len = route_length(inst, perm);
      if (len < t.length - 1e-12) {
        t.length = len;
        t.order = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return tours;
}

struct Candidate {
  std::size_t mask = 0;
  double profit = 0.0;
};

// Lexicographic preference: objective, then fewer visits, then route vector.
inline bool prefer(double obj_a, int count_a, const std::vector<Route>& routes_a, double obj_b, int count_b,
                   const std::vector<Route>& routes_b) {
  if (objective_better(obj_a, obj_b)) return true;
  if (!objective_equal(obj_a, obj_b)) return false;
  if (count_a != count_b) return count_a < count_b;
  return routes_a < routes_b;
}

class ExactSearch {
 public:
  ExactSearch(const Instance& inst, const std::vector<SubsetTour>& tours) : inst_(inst), tours_(tours) {
    const std::size_t m = inst.fleet().size();
    candidates_.resize(m);
    best_single_.assign(m, 0.0);
    for (std::size_t v = 0; v < m; ++v) {
      const auto& veh = inst.fleet()[v];
      for (std::size_t mask = 0; mask < tours.size(); ++mask) {
        const auto& t = tours[mask];
        if (!t.valid) continue;
        if (t.length > veh.max_distance + kFeasibilityTolerance) continue;
        if (t.load > veh.capacity + kFeasibilityTolerance) continue;
        const double profit = t.value - inst.travel_cost() * t.length;
        candidates_[v].push_back({mask, profit});
      }
      std::stable_sort(candidates_[v].begin(), candidates_[v].end(),
                       [](const Candidate& a, const Candidate& b) { return a.profit > b.profit; });
      best_single_[v] = std::max(0.0, candidates_[v].front().profit);
    }
    suffix_bound_.assign(m + 1, 0.0);
    for (std::size_t v = m; v-- > 0;) suffix_bound_[v] = suffix_bound_[v + 1] + best_single_[v];
    visits_.assign(inst.size(), 0);
    current_.assign(m, 0);
  }

  Solution run() {
    best_obj_ = 0.0;
    best_count_ = 0;
    best_routes_.assign(inst_.fleet().size(), Route{});
    recurse(0, 0.0, 0);
    return {best_routes_, best_obj_};
  }

 private:
  void recurse(std::size_t v, double partial, int count) {
    const std::size_t m = inst_.fleet().size();
    if (v == m) {
      std::vector<Route> routes(m);
      for (std::size_t k = 0; k < m; ++k) routes[k] = tours_[current_[k]].order;
      // Recompute from scratch so the reported objective matches objective_value.
      const double obj = objective_value(inst_, Solution{routes, 0.0});
      if (prefer(obj, count, routes, best_obj_, best_count_, best_routes_)) {
        best_obj_ = obj;
        best_count_ = count;
        best_routes_ = std::move(routes);
      }
      return;
    }
    for (const auto& c : candidates_[v]) {
      const double bound = partial + c.profit + suffix_bound_[v + 1];
      if (objective_better(best_obj_, bound)) break;  // candidates sorted by profit
      if (!admissible(c.mask)) continue;
      apply(c.mask, +1);
      current_[v] = c.mask;
      recurse(v + 1, partial + c.profit, count + tours_[c.mask].count);
      apply(c.mask, -1);
    }
  }

  bool admissible(std::size_t mask) const {
    for (std::size_t i = 0; i < inst_.size(); ++i)
      if ((mask >> i) & 1u)
        if (visits_[i] + 1 > inst_.node(i).max_visits) return false;
    return true;
  }

  void apply(std::size_t mask, int delta) {
    for (std::size_t i = 0; i < inst_.size(); ++i)
      if ((mask >> i) & 1u) visits_[i] += delta;
  }

  const Instance& inst_;
  const std::vector<SubsetTour>& tours_;
  std::vector<std::vector<Candidate>> candidates_;
  std::vector<double> best_single_;
  std::vector<double> suffix_bound_;
  std::vector<int> visits_;
  std::vector<std::size_t> current_;
  double best_obj_ = 0.0;
  int best_count_ = 0;
  std::vector<Route> best_routes_;
};

}  // namespace detail

// Provably optimal solution by enumeration over node subsets, vehicle
// assignments and visit orders. Throws SizeError above `site_limit` nodes.
inline Solution solve_exact(const Instance& inst, std::size_t site_limit = kDefaultExactSiteLimit) {
  if (inst.size() > site_limit)
    throw SizeError("solve_exact: " + std::to_string(inst.size()) + " sites exceeds the exact-solver limit of " +
                    std::to_string(site_limit));
  if (inst.size() > 20) throw SizeError("solve_exact: subset enumeration limited to 20 sites");
  const auto tours = detail::enumerate_subset_tours(inst);
  detail::ExactSearch search(inst, tours);
  return search.run();
}

}  // namespace hazard::vrpp
