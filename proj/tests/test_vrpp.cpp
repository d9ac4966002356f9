#include <gtest/gtest.h>

#include <vector>

#include "hazard/vrpp.hpp"
#include "hazard/vrpp_exact.hpp"
#include "hazard/vrpp_heuristic.hpp"
#include "hazard/vrpp_io.hpp"
#include "test_util.hpp"

using namespace hazard;
using namespace hazard::vrpp;

namespace {

Node node(std::size_t site, double x, double y, double value, double demand = 0.0, int max_visits = 1) {
  return Node{site, {x, y}, value, demand, max_visits};
}

Instance two_site_sensing() {
  return Instance(Mode::sensing, {node(0, 0.0, 0.1, 10.0), node(1, 0.0, 0.4, 1.0)}, {Vehicle{0.5, kUnlimited}}, 1.0);
}

bool has_kind(const std::vector<Violation>& vs, ViolationKind k) {
  for (const auto& v : vs)
    if (v.kind == k) return true;
  return false;
}

}  // namespace

TEST(BuildInstance, ZeroValueSitesExcluded) {
  const std::vector<double> values{5.0, 0.0, 2.0};
  const auto sites = make_geometry(std::vector<Point>{{0.1, 0.0}, {0.2, 0.0}, {0.3, 0.0}});
  const auto inst = build_instance(Mode::sensing, values, {}, {}, sites, {2, 1.5, kUnlimited}, 1.0);
  ASSERT_EQ(inst.size(), 2u);
  EXPECT_EQ(inst.node(0).site, 0u);
  EXPECT_EQ(inst.node(1).site, 2u);
}

TEST(BuildInstance, ModeSpecificLimits) {
  const std::vector<double> values{5.0};
  const auto sites = make_geometry(std::vector<Point>{{0.1, 0.0}});
  const auto s = build_instance(Mode::sensing, values, {}, {}, sites, {2, 1.5, 100.0}, 1.0);
  for (const auto& v : s.fleet()) {
    EXPECT_EQ(v.max_distance, 1.5);
    EXPECT_EQ(v.capacity, kUnlimited);
  }
  const auto c = build_instance(Mode::cleaning, values, {}, {}, sites, {2, 1.5, 100.0}, 1.0);
  for (const auto& v : c.fleet()) {
    EXPECT_EQ(v.max_distance, kUnlimited);
    EXPECT_EQ(v.capacity, 100.0);
  }
  EXPECT_THROW(build_instance(Mode::sensing, values, {}, {}, sites, {0, 1.5, 100.0}, 1.0), ConfigError);
}

TEST(Instance, DistanceMatrixIsMetric) {
  Rng rng(1);
  const auto inst = testutil::random_instance(rng, 8, false);
  const std::size_t m = inst.size() + 1;
  for (std::size_t a = 0; a < m; ++a) {
    EXPECT_EQ(inst.vertex_distance(a, a), 0.0);
    for (std::size_t b = 0; b < m; ++b) {
      EXPECT_EQ(inst.vertex_distance(a, b), inst.vertex_distance(b, a));
      for (std::size_t c = 0; c < m; ++c)
        EXPECT_LE(inst.vertex_distance(a, c), inst.vertex_distance(a, b) + inst.vertex_distance(b, c) + 1e-12);
    }
  }
}

TEST(Instance, SharedSitesFormOneGroup) {
  const Instance inst(Mode::cleaning, {node(4, 0.1, 0.0, 10.0, 5.0), node(9, 0.2, 0.0, 3.0, 1.0),
                                       node(4, 0.1, 0.0, 4.0, 2.0)},
                      {Vehicle{}, Vehicle{}}, 1.0);
  EXPECT_EQ(inst.num_groups(), 2u);
  EXPECT_EQ(inst.group(0), inst.group(2));
  EXPECT_NE(inst.group(0), inst.group(1));
  const Solution twice{{{0, 2}, {}}, 0.0};
  EXPECT_TRUE(has_kind(validate_solution(inst, twice), ViolationKind::repeated_in_route));
  const Solution split{{{0}, {2}}, 0.0};
  EXPECT_TRUE(is_feasible(inst, split));
}

TEST(ObjectiveValue, Examples) {
  const auto inst = two_site_sensing();
  EXPECT_EQ(objective_value(inst, empty_solution(inst)), 0.0);
  EXPECT_NEAR(objective_value(inst, Solution{{{0}}, 0.0}), 9.8, 1e-12);
  const Instance clean(Mode::cleaning, {node(0, 0.0, 0.0, 7.0, 1.0, 2)}, {Vehicle{}, Vehicle{}}, 1.0);
  EXPECT_NEAR(objective_value(clean, Solution{{{0}, {0}}, 0.0}), 14.0, 1e-12);
  EXPECT_THROW(objective_value(inst, Solution{{{5}}, 0.0}), InputError);
}

TEST(ValidateSolution, Examples) {
  const auto inst = two_site_sensing();
  EXPECT_TRUE(is_feasible(inst, empty_solution(inst)));
  // 0.9 km out and back is 1.8 km against a 1.5 km budget.
  const Instance far(Mode::sensing, {node(0, 0.0, 0.9, 5.0)}, {Vehicle{1.5, kUnlimited}}, 1.0);
  EXPECT_TRUE(has_kind(validate_solution(far, Solution{{{0}}, 0.0}), ViolationKind::distance_budget));
  const Instance two(Mode::sensing, {node(0, 0.0, 0.1, 5.0), node(1, 0.1, 0.0, 5.0), node(2, 0.0, 0.2, 5.0),
                                     node(3, 0.2, 0.0, 5.0)},
                     {Vehicle{}, Vehicle{}}, 1.0);
  EXPECT_TRUE(has_kind(validate_solution(two, Solution{{{3}, {3}}, 0.0}),
                       ViolationKind::visited_by_multiple_vehicles));
  EXPECT_TRUE(has_kind(validate_solution(two, Solution{{{3}}, 0.0}), ViolationKind::route_count));
  const Instance cap(Mode::cleaning, {node(0, 0.1, 0.0, 5.0, 30.0), node(1, 0.2, 0.0, 5.0, 30.0)},
                     {Vehicle{kUnlimited, 50.0}}, 1.0);
  EXPECT_TRUE(has_kind(validate_solution(cap, Solution{{{0, 1}}, 0.0}), ViolationKind::capacity));
  const Instance cleancap(Mode::cleaning, {node(0, 0.1, 0.0, 5.0, 1.0, 1)}, {Vehicle{}, Vehicle{}}, 1.0);
  EXPECT_TRUE(has_kind(validate_solution(cleancap, Solution{{{0}, {0}}, 0.0}), ViolationKind::visit_cap_exceeded));
}

TEST(SolveExact, Examples) {
  const Instance none(Mode::sensing, {}, {Vehicle{1.5, kUnlimited}}, 1.0);
  const auto e = solve_exact(none);
  EXPECT_EQ(e.objective, 0.0);
  EXPECT_TRUE(e.routes[0].empty());

  const auto sol = solve_exact(two_site_sensing());
  EXPECT_NEAR(sol.objective, 9.8, 1e-12);
  EXPECT_EQ(sol.routes[0], (Route{0}));

  const Instance tiny(Mode::sensing, {node(0, 0.2, 0.0, 0.05)}, {Vehicle{1.5, kUnlimited}}, 1.0);
  EXPECT_TRUE(solve_exact(tiny).routes[0].empty());
}

TEST(SolveExact, SizeGuard) {
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < 9; ++i) nodes.push_back(node(i, 0.01 * i, 0.0, 1.0));
  const Instance big(Mode::sensing, nodes, {Vehicle{}}, 1.0);
  EXPECT_THROW(solve_exact(big), SizeError);
}

TEST(SolveExact, ZeroValueSiteDoesNotChangeOptimum) {
  Rng rng(17);
  for (int t = 0; t < 30; ++t) {
    const auto inst = testutil::random_instance(rng, 6, t % 2 == 1);
    auto nodes = inst.nodes();
    nodes.push_back(node(nodes.size(), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), 0.0));
    const Instance plus(inst.mode(), nodes, inst.fleet(), inst.travel_cost());
    EXPECT_TRUE(objective_equal(solve_exact(inst).objective, solve_exact(plus).objective));
  }
}

TEST(SolveHeuristic, MatchesHandExample) {
  Rng rng(1);
  const auto sol = solve_heuristic(two_site_sensing(), rng);
  EXPECT_NEAR(sol.objective, 9.8, 1e-12);
}

TEST(SolveHeuristic, SeededDeterminism) {
  Rng gen(3);
  for (int t = 0; t < 20; ++t) {
    const auto inst = testutil::random_instance(gen, 30, t % 2 == 0);
    Rng a(99), b(99);
    EXPECT_EQ(solve_heuristic(inst, a), solve_heuristic(inst, b));
  }
}

TEST(SolveHeuristic, PropertyFeasibleAndBoundedByExact) {
  Rng gen(5);
  int matches = 0;
  const int trials = 120;
  for (int t = 0; t < trials; ++t) {
    const auto inst = testutil::random_instance(gen, 7, t % 2 == 0);
    Rng rng(static_cast<std::uint64_t>(t));
    const auto h = solve_heuristic(inst, rng);
    const auto e = solve_exact(inst);
    ASSERT_TRUE(is_feasible(inst, h)) << "trial " << t;
    ASSERT_TRUE(is_feasible(inst, e)) << "trial " << t;
    ASSERT_NEAR(h.objective, objective_value(inst, h), 1e-9);
    ASSERT_NEAR(e.objective, objective_value(inst, e), 1e-9);
    ASSERT_FALSE(objective_better(h.objective, e.objective)) << "trial " << t;
    matches += objective_equal(h.objective, e.objective) ? 1 : 0;
  }
  EXPECT_GE(matches, trials * 95 / 100);
}

TEST(SolveHeuristic, PropertyAddDropLocalOptimality) {
  Rng gen(8);
  for (int t = 0; t < 60; ++t) {
    const auto inst = testutil::random_instance(gen, 25, t % 2 == 1);
    Rng rng(static_cast<std::uint64_t>(t));
    const auto sol = solve_heuristic(inst, rng);
    const double base = objective_value(inst, sol);
    // Dropping any visit must not help.
    for (std::size_t m = 0; m < sol.routes.size(); ++m)
      for (std::size_t p = 0; p < sol.routes[m].size(); ++p) {
        Solution s = sol;
        s.routes[m].erase(s.routes[m].begin() + static_cast<long>(p));
        ASSERT_FALSE(objective_better(objective_value(inst, s), base)) << "drop improves, trial " << t;
      }
    // Inserting any node anywhere must not help while staying feasible.
    for (std::size_t i = 0; i < inst.size(); ++i)
      for (std::size_t m = 0; m < sol.routes.size(); ++m)
        for (std::size_t p = 0; p <= sol.routes[m].size(); ++p) {
          Solution s = sol;
          s.routes[m].insert(s.routes[m].begin() + static_cast<long>(p), i);
          if (!is_feasible(inst, s)) continue;
          ASSERT_FALSE(objective_better(objective_value(inst, s), base)) << "insert improves, trial " << t;
        }
  }
}

TEST(SolveHeuristic, LargeInstanceIsFeasible) {
  Rng gen(11);
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < 50; ++i)
    nodes.push_back(node(i, gen.uniform(-0.5, 0.5), gen.uniform(-0.5, 0.5), gen.uniform(0.0, 250.0)));
  const Instance inst(Mode::sensing, nodes, {Vehicle{1.5, kUnlimited}, Vehicle{1.5, kUnlimited}}, 1.0);
  Rng rng(2);
  EXPECT_TRUE(is_feasible(inst, solve_heuristic(inst, rng)));
}

TEST(VrppIo, RoundTripWithUnlimitedLimits) {
  Rng gen(4);
  const auto inst = testutil::random_instance(gen, 8, true);
  const auto j = instance_to_json(inst);
  EXPECT_TRUE(j["vehicles"][0]["max_distance"].is_null());
  const auto back = instance_from_json(j);
  EXPECT_EQ(back.nodes(), inst.nodes());
  EXPECT_EQ(back.fleet(), inst.fleet());
  EXPECT_EQ(back.travel_cost(), inst.travel_cost());
  EXPECT_EQ(back.mode(), inst.mode());
}

TEST(VrppIo, MalformedInstanceRejected) {
  EXPECT_THROW(instance_from_json(json::parse(R"({"mode":"flying","vehicles":[],"nodes":[]})")), InputError);
  EXPECT_THROW(instance_from_json(json::parse(R"({"mode":"sensing","nodes":[]})")), InputError);
  EXPECT_THROW(instance_from_json(json::parse(R"({"mode":"sensing","vehicles":[],"nodes":[]})")), InputError);
}
