#pragma once

// GRASP-style VRPP heuristic: greedy randomized insertion, local search over
// intra-route (2-opt, or-opt) and inter-route (relocate, swap) moves plus
// add/drop/replace of visits, iterated with ruin-and-recreate restarts.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hazard/rng.hpp"
#include "hazard/vrpp.hpp"

namespace hazard::vrpp {

struct HeuristicOptions {
  std::size_t budget = 60;          // improvement iterations, >= 1
  std::size_t candidate_list = 3;   // randomized construction picks among the top-k insertions
  std::size_t restart_every = 10;   // fresh randomized construction every k iterations
};

namespace detail {

inline constexpr double kMoveEps = 1e-9;

class RouteSearch {
 public:
  explicit RouteSearch(const Instance& inst)
      : inst_(inst),
        m_(inst.fleet().size()),
        n_(inst.size()),
        routes_(m_),
        len_(m_, 0.0),
        load_(m_, 0.0),
        visits_(n_, 0),
        in_route_(m_, std::vector<char>(inst.num_groups(), 0)) {}

  void reset() {
    for (std::size_t r = 0; r < m_; ++r) {
      routes_[r].clear();
      len_[r] = 0.0;
      load_[r] = 0.0;
      std::fill(in_route_[r].begin(), in_route_[r].end(), 0);
    }
    std::fill(visits_.begin(), visits_.end(), 0);
  }

  void load_routes(const std::vector<Route>& routes) {
    reset();
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t i : routes[r]) insert_at(r, i, routes_[r].size());
  }

  const std::vector<Route>& routes() const noexcept { return routes_; }

  double objective() const {
    double value = 0.0, length = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t i : routes_[r]) value += inst_.node(i).value;
      length += len_[r];
    }
    return value - inst_.travel_cost() * length;
  }

  std::size_t visited_count() const {
    std::size_t k = 0;
    for (const auto& r : routes_) k += r.size();
    return k;
  }

  // Greedy insertion by value per unit of normalized resource use. With
  // `rng == nullptr` the best candidate is always taken.
  void construct(Rng* rng, std::size_t candidate_list) {
    struct Cand {
      double score;
      std::size_t node, route, pos;
    };
    std::vector<Cand> cands;
    for (;;) {
      cands.clear();
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t r = 0; r < m_; ++r) {
          if (!can_host(r, i)) continue;
          const auto [pos, delta] = best_insertion(r, i);
          if (pos == kNoPos) continue;
          const double gain = inst_.node(i).value - inst_.travel_cost() * delta;
          if (!(gain > kMoveEps)) continue;
          cands.push_back({insertion_score(r, i, delta, gain), i, r, pos});
        }
      }
      if (cands.empty()) return;
      std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.score > b.score; });
      std::size_t pick = 0;
      if (rng != nullptr && candidate_list > 1) pick = rng->index(std::min(candidate_list, cands.size()));
      insert_at(cands[pick].route, cands[pick].node, cands[pick].pos);
    }
  }

  // Remove each visit independently with probability `fraction`; at least one.
  void ruin(Rng& rng, double fraction) {
    std::vector<std::pair<std::size_t, std::size_t>> visits;
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t i : routes_[r]) visits.emplace_back(r, i);
    if (visits.empty()) return;
    std::vector<bool> drop(visits.size(), false);
    bool any = false;
    for (std::size_t k = 0; k < visits.size(); ++k)
      if (rng.uniform(0.0, 1.0) < fraction) drop[k] = any = true;
    if (!any) drop[rng.index(visits.size())] = true;
    for (std::size_t k = 0; k < visits.size(); ++k) {
      if (!drop[k]) continue;
      const auto [r, i] = visits[k];
      const auto it = std::find(routes_[r].begin(), routes_[r].end(), i);
      remove_at(r, static_cast<std::size_t>(it - routes_[r].begin()));
    }
  }

  void local_search() {
    for (;;) {
      bool improved = false;
      for (std::size_t r = 0; r < m_; ++r) {
        while (two_opt(r)) improved = true;
        while (or_opt(r)) improved = true;
      }
      if (add_best()) continue;
      if (drop_best()) continue;
      if (relocate_best()) continue;
      if (swap_best()) continue;
      if (replace_best()) continue;
      if (!improved) return;
    }
  }

 private:
  static constexpr std::size_t kNoPos = std::numeric_limits<std::size_t>::max();

  static std::size_t vtx(std::size_t node) noexcept { return node + 1; }
  double d(std::size_t a, std::size_t b) const noexcept { return inst_.vertex_distance(a, b); }

  std::size_t vertex_before(std::size_t r, std::size_t pos) const {
    return pos == 0 ? 0 : vtx(routes_[r][pos - 1]);
  }
  std::size_t vertex_at(std::size_t r, std::size_t pos) const {
    return pos >= routes_[r].size() ? 0 : vtx(routes_[r][pos]);
  }

  bool can_host(std::size_t r, std::size_t i) const {
    return !in_route_[r][inst_.group(i)] && visits_[i] < inst_.node(i).max_visits;
  }

  bool within_limits(std::size_t r, double new_len, double new_load) const {
    const auto& v = inst_.fleet()[r];
    return new_len <= v.max_distance + kFeasibilityTolerance && new_load <= v.capacity + kFeasibilityTolerance;
  }

  double insertion_score(std::size_t r, std::size_t i, double delta, double gain) const {
    const auto& v = inst_.fleet()[r];
    double use = 0.0;
    if (std::isfinite(v.max_distance) && v.max_distance > 0.0) use += delta / v.max_distance;
    if (std::isfinite(v.capacity) && v.capacity > 0.0) use += inst_.node(i).demand / v.capacity;
    if (!(use > 0.0)) use = 0.0;
    return gain / (use + 1e-6);
  }

  // Cheapest feasible insertion position of node i into route r.
  std::pair<std::size_t, double> best_insertion(std::size_t r, std::size_t i) const {
    const double new_load = load_[r] + inst_.node(i).demand;
    if (!within_limits(r, 0.0, new_load)) return {kNoPos, 0.0};
    std::size_t best_pos = kNoPos;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t k = routes_[r].size();
    const std::size_t vi = vtx(i);
    for (std::size_t p = 0; p <= k; ++p) {
      const std::size_t a = vertex_before(r, p), b = vertex_at(r, p);
      const double delta = d(a, vi) + d(vi, b) - d(a, b);
      if (delta < best - 1e-15) {
        best = delta;
        best_pos = p;
      }
    }
    if (best_pos == kNoPos || !within_limits(r, len_[r] + best, new_load)) return {kNoPos, 0.0};
    return {best_pos, best};
  }

  double removal_saving(std::size_t r, std::size_t pos) const {
    const std::size_t a = vertex_before(r, pos), b = vertex_at(r, pos + 1), v = vtx(routes_[r][pos]);
    return d(a, v) + d(v, b) - d(a, b);
  }

  void refresh(std::size_t r) {
    len_[r] = route_length(inst_, routes_[r]);
    load_[r] = route_load(inst_, routes_[r]);
  }

  void insert_at(std::size_t r, std::size_t i, std::size_t pos) {
    routes_[r].insert(routes_[r].begin() + static_cast<std::ptrdiff_t>(pos), i);
    in_route_[r][inst_.group(i)] = 1;
    ++visits_[i];
    refresh(r);
  }

  void remove_at(std::size_t r, std::size_t pos) {
    const std::size_t i = routes_[r][pos];
    routes_[r].erase(routes_[r].begin() + static_cast<std::ptrdiff_t>(pos));
    in_route_[r][inst_.group(i)] = 0;
    --visits_[i];
    refresh(r);
  }

  bool two_opt(std::size_t r) {
    auto& route = routes_[r];
    const std::size_t k = route.size();
    if (k < 2) return false;
    double best = -kMoveEps;
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a + 1 < k; ++a) {
      const std::size_t pa = vertex_before(r, a), va = vtx(route[a]);
      for (std::size_t b = a + 1; b < k; ++b) {
        const std::size_t vb = vtx(route[b]), nb = vertex_at(r, b + 1);
        const double delta = d(pa, vb) + d(va, nb) - d(pa, va) - d(vb, nb);
        if (delta < best) {
          best = delta;
          ba = a;
          bb = b;
        }
      }
    }
    if (best >= -kMoveEps) return false;
    std::reverse(route.begin() + static_cast<std::ptrdiff_t>(ba), route.begin() + static_cast<std::ptrdiff_t>(bb) + 1);
    refresh(r);
    return true;
  }

  bool or_opt(std::size_t r) {
    const std::size_t k = routes_[r].size();
    if (k < 3) return false;
    for (std::size_t p = 0; p < k; ++p) {
      const std::size_t i = routes_[r][p];
      const double saving = removal_saving(r, p);
      Route reduced = routes_[r];
      reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(p));
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_q = kNoPos;
      for (std::size_t q = 0; q <= reduced.size(); ++q) {
        if (q == p) continue;
        const std::size_t a = q == 0 ? 0 : vtx(reduced[q - 1]);
        const std::size_t b = q >= reduced.size() ? 0 : vtx(reduced[q]);
        const double delta = d(a, vtx(i)) + d(vtx(i), b) - d(a, b);
        if (delta < best) {
          best = delta;
          best_q = q;
        }
      }
      if (best_q != kNoPos && best - saving < -kMoveEps) {
        reduced.insert(reduced.begin() + static_cast<std::ptrdiff_t>(best_q), i);
        routes_[r] = std::move(reduced);
        refresh(r);
        return true;
      }
    }
    return false;
  }

  bool add_best() {
    double best_gain = kMoveEps;
    std::size_t bi = kNoPos, br = 0, bp = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t r = 0; r < m_; ++r) {
        if (!can_host(r, i)) continue;
        const auto [pos, delta] = best_insertion(r, i);
        if (pos == kNoPos) continue;
        const double gain = inst_.node(i).value - inst_.travel_cost() * delta;
        if (gain > best_gain) {
          best_gain = gain;
          bi = i;
          br = r;
          bp = pos;
        }
      }
    if (bi == kNoPos) return false;
    insert_at(br, bi, bp);
    return true;
  }

  bool drop_best() {
    double best_gain = kMoveEps;
    std::size_t br = kNoPos, bp = 0;
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t p = 0; p < routes_[r].size(); ++p) {
        const double gain = inst_.travel_cost() * removal_saving(r, p) - inst_.node(routes_[r][p]).value;
        if (gain > best_gain) {
          best_gain = gain;
          br = r;
          bp = p;
        }
      }
    if (br == kNoPos) return false;
    remove_at(br, bp);
    return true;
  }

  // Move one visit to another route when that shortens the total distance.
  bool relocate_best() {
    if (m_ < 2) return false;
    double best = -kMoveEps;
    std::size_t b_from = kNoPos, b_pos = 0, b_to = 0, b_ins = 0;
    for (std::size_t r1 = 0; r1 < m_; ++r1)
      for (std::size_t p = 0; p < routes_[r1].size(); ++p) {
        const std::size_t i = routes_[r1][p];
        const double saving = removal_saving(r1, p);
        for (std::size_t r2 = 0; r2 < m_; ++r2) {
          if (r2 == r1 || in_route_[r2][inst_.group(i)]) continue;
          const auto [pos, delta] = best_insertion(r2, i);
          if (pos == kNoPos) continue;
          const double change = delta - saving;
          if (change < best) {
            best = change;
            b_from = r1;
            b_pos = p;
            b_to = r2;
            b_ins = pos;
          }
        }
      }
    if (b_from == kNoPos) return false;
    const std::size_t i = routes_[b_from][b_pos];
    remove_at(b_from, b_pos);
    insert_at(b_to, i, b_ins);
    return true;
  }

  // Exchange one visit between two routes in place.
  bool swap_best() {
    if (m_ < 2) return false;
    double best = -kMoveEps;
    std::size_t br1 = kNoPos, bp1 = 0, br2 = 0, bp2 = 0;
    for (std::size_t r1 = 0; r1 < m_; ++r1)
      for (std::size_t r2 = r1 + 1; r2 < m_; ++r2)
        for (std::size_t p1 = 0; p1 < routes_[r1].size(); ++p1) {
          const std::size_t i = routes_[r1][p1];
          if (in_route_[r2][inst_.group(i)]) continue;
          const std::size_t a1 = vertex_before(r1, p1), b1 = vertex_at(r1, p1 + 1);
          for (std::size_t p2 = 0; p2 < routes_[r2].size(); ++p2) {
            const std::size_t j = routes_[r2][p2];
            if (in_route_[r1][inst_.group(j)]) continue;
            const std::size_t a2 = vertex_before(r2, p2), b2 = vertex_at(r2, p2 + 1);
            const double d1 = d(a1, vtx(j)) + d(vtx(j), b1) - d(a1, vtx(i)) - d(vtx(i), b1);
            const double d2 = d(a2, vtx(i)) + d(vtx(i), b2) - d(a2, vtx(j)) - d(vtx(j), b2);
            if (d1 + d2 >= best) continue;
            const double di = inst_.node(i).demand, dj = inst_.node(j).demand;
            if (!within_limits(r1, len_[r1] + d1, load_[r1] - di + dj)) continue;
            if (!within_limits(r2, len_[r2] + d2, load_[r2] - dj + di)) continue;
            best = d1 + d2;
            br1 = r1;
            bp1 = p1;
            br2 = r2;
            bp2 = p2;
          }
        }
    if (br1 == kNoPos) return false;
    std::swap(routes_[br1][bp1], routes_[br2][bp2]);
    const std::size_t i = routes_[br2][bp2], j = routes_[br1][bp1];
    in_route_[br1][inst_.group(i)] = 0;
    in_route_[br2][inst_.group(j)] = 0;
    in_route_[br1][inst_.group(j)] = 1;
    in_route_[br2][inst_.group(i)] = 1;
    refresh(br1);
    refresh(br2);
    return true;
  }

  // Trade a visited node for a node the route does not yet host.
  bool replace_best() {
    double best_gain = kMoveEps;
    std::size_t br = kNoPos, bp = 0, bi = 0, bq = 0;
    const double c = inst_.travel_cost();
    Route reduced;
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t p = 0; p < routes_[r].size(); ++p) {
        const std::size_t out = routes_[r][p];
        const double saving = removal_saving(r, p);
        const double base_len = len_[r] - saving;
        const double base_load = load_[r] - inst_.node(out).demand;
        reduced = routes_[r];
        reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(p));
        for (std::size_t i = 0; i < n_; ++i) {
          if (i == out || !can_host(r, i)) continue;
          const double new_load = base_load + inst_.node(i).demand;
          if (!within_limits(r, 0.0, new_load)) continue;
          const double value_gain = inst_.node(i).value - inst_.node(out).value;
          // Upper bound on the gain: the insertion costs at least nothing.
          if (!(value_gain + c * saving > best_gain)) continue;
          double best_delta = std::numeric_limits<double>::infinity();
          std::size_t best_q = kNoPos;
          for (std::size_t q = 0; q <= reduced.size(); ++q) {
            const std::size_t a = q == 0 ? 0 : vtx(reduced[q - 1]);
            const std::size_t b = q >= reduced.size() ? 0 : vtx(reduced[q]);
            const double delta = d(a, vtx(i)) + d(vtx(i), b) - d(a, b);
            if (delta < best_delta) {
              best_delta = delta;
              best_q = q;
            }
          }
          if (!within_limits(r, base_len + best_delta, new_load)) continue;
          const double gain = value_gain - c * (best_delta - saving);
          if (gain > best_gain) {
            best_gain = gain;
            br = r;
            bp = p;
            bi = i;
            bq = best_q;
          }
        }
      }
    }
    if (br == kNoPos) return false;
    remove_at(br, bp);
    insert_at(br, bi, bq);
    return true;
  }

  const Instance& inst_;
  std::size_t m_, n_;
  std::vector<Route> routes_;
  std::vector<double> len_, load_;
  std::vector<int> visits_;
  std::vector<std::vector<char>> in_route_;
};

}  // namespace detail

// Feasible solution for any instance size; deterministic for a given rng
// state. The first iteration is the pure greedy construction followed by local
// search, so the result never falls below that baseline.
inline Solution solve_heuristic(const Instance& inst, Rng& rng, const HeuristicOptions& opts = {}) {
  if (opts.budget < 1) throw ContractError("solve_heuristic: budget must be >= 1");
  Solution best = empty_solution(inst);
  if (inst.size() == 0) return best;

  detail::RouteSearch search(inst);
  search.construct(nullptr, 1);
  search.local_search();
  std::vector<Route> best_routes = search.routes();
  double best_obj = search.objective();
  std::size_t best_count = search.visited_count();

  for (std::size_t it = 1; it < opts.budget; ++it) {
    if (opts.restart_every > 0 && it % opts.restart_every == 0) {
      search.reset();
    } else {
      search.load_routes(best_routes);
      search.ruin(rng, 0.3);
    }
    search.construct(&rng, opts.candidate_list);
    search.local_search();
    const double obj = search.objective();
    const std::size_t count = search.visited_count();
    if (objective_better(obj, best_obj) || (objective_equal(obj, best_obj) && count < best_count)) {
      best_obj = obj;
      best_count = count;
      best_routes = search.routes();
    }
  }
  best.routes = std::move(best_routes);
  best.objective = objective_value(inst, best);
  return best;
}

}  // namespace hazard::vrpp
