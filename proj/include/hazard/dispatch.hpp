#pragma once

// Round-based sensing/cleaning dispatch loop and the episode metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hazard/belief.hpp"
#include "hazard/env.hpp"
#include "hazard/errors.hpp"
#include "hazard/policy.hpp"
#include "hazard/rng.hpp"
#include "hazard/vrpp.hpp"
#include "hazard/vrpp_heuristic.hpp"

namespace hazard {

struct VehicleParams {
  double max_distance = 1.5;   // D_m, km per UAV route
  double capacity = 100.0;     // Q_m per UGV route
  double unit_capacity = 25.0; // Q_unit per site visit
  double travel_cost = 1.0;    // c per km
  double kappa = 0.1;          // distance penalty per km
  double beta = 20.0;          // exploration coefficient
  double cleaning_travel_cost = 1.0;  // c used by the cleaning phase

  friend bool operator==(const VehicleParams&, const VehicleParams&) = default;

  void validate() const {
    auto require = [](bool ok, const char* key, const std::string& msg) {
      if (!ok) throw ConfigError(std::string(key) + ": " + msg, key);
    };
    require(std::isfinite(max_distance) && max_distance > 0.0, "max_distance", "must be > 0");
    require(std::isfinite(capacity) && capacity > 0.0, "capacity", "must be > 0");
    require(std::isfinite(unit_capacity) && unit_capacity > 0.0 && unit_capacity <= capacity, "unit_capacity",
            "must lie in (0, capacity]");
    require(std::isfinite(travel_cost) && travel_cost >= 0.0, "travel_cost", "must be >= 0");
    require(std::isfinite(cleaning_travel_cost) && cleaning_travel_cost >= 0.0, "cleaning_travel_cost",
            "must be >= 0");
    require(std::isfinite(kappa) && kappa >= 0.0, "kappa", "must be >= 0");
    require(std::isfinite(beta) && beta >= 0.0, "beta", "must be >= 0");
  }
};

// How cleaning visits at one site are offered to the UGV planner.
enum class CleaningVisitModel {
  tiered,   // ceil(mu / Q_unit) visit slots; slot k plans min(Q_unit, mu - (k-1) Q_unit)
  uniform,  // one node per site, every visit plans min(mu, Q_unit), any UGV may visit
};

inline const char* to_string(CleaningVisitModel c) { return c == CleaningVisitModel::tiered ? "tiered" : "uniform"; }

struct ScenarioConfig {
  std::string name = "custom";
  std::size_t num_sites = 20;
  std::size_t num_uavs = 2;
  std::size_t num_ugvs = 2;
  int max_rounds = 50;
  Strategy strategy = Strategy::bucb;
  EnvParams env{.spatial_unit_km = 0.001};  // spillover distances in meters
  BeliefParams belief;  // noise_var and mean_cap are derived from env
  VehicleParams vehicles{.cleaning_travel_cost = 0.0};
  CleaningVisitModel visit_model = CleaningVisitModel::tiered;
  bool rebase_history_on_cleaning = false;
  bool use_spare_capacity = true;
  std::size_t solver_budget = 60;
  std::uint64_t seed = 0;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;

  BeliefParams effective_belief() const {
    BeliefParams b = belief;
    b.noise_var = env.noise_std * env.noise_std;
    b.mean_cap = env.saturation;
    return b;
  }

  void validate() const {
    if (num_sites < 1) throw ConfigError("num_sites: must be >= 1", "num_sites");
    if (num_uavs < 1) throw ConfigError("num_uavs: must be >= 1", "num_uavs");
    if (num_ugvs < 1) throw ConfigError("num_ugvs: must be >= 1", "num_ugvs");
    if (max_rounds < 1) throw ConfigError("max_rounds: must be >= 1", "max_rounds");
    if (solver_budget < 1) throw ConfigError("solver_budget: must be >= 1", "solver_budget");
    env.validate();
    if (!(env.noise_std > 0.0)) throw ConfigError("noise_std: must be > 0 for belief updates", "noise_std");
    effective_belief().validate();
    vehicles.validate();
  }
};

// Routes expressed in environment site ids.
struct PhasePlan {
  std::vector<std::vector<std::size_t>> routes;
  double objective = 0.0;
};

struct RoundRecord {
  int round = 0;
  PhasePlan sensing;
  PhasePlan cleaning;
  std::vector<Observation> observations;
  std::vector<CleaningVisit> cleaning_visits;
  std::vector<double> hazard_start;  // truth when the round began
  std::vector<double> hazard_end;    // truth after cleaning, before growth
  std::vector<double> belief_mean;   // beliefs after the round's updates
  std::vector<double> belief_var;
  std::vector<bool> sensed;
  std::vector<double> removed_by_site;
  std::vector<double> removed_per_vehicle;
  double removed = 0.0;  // C_t, actual removal
  std::optional<double> sensing_ratio;
  std::vector<std::size_t> residual_boost_sites;
  bool all_clear = false;
};

struct Metrics {
  int termination_round = 0;
  bool completed = false;
  double cumulative_hazard = 0.0;
  double cleaning_rate = 0.0;
  double final_mae = 0.0;
  double final_mean_variance = 0.0;
  std::vector<double> remaining_hazard;
  std::vector<double> mae;
  std::vector<double> mean_variance;
  std::vector<std::optional<double>> sensing_ratio;
  std::vector<std::vector<double>> removed_per_vehicle;
};

struct EpisodeResult {
  ScenarioConfig config;
  std::vector<RoundRecord> rounds;
  Metrics metrics;
};

struct Episode {
  ScenarioConfig config;
  BeliefParams belief_params;
  Environment env;
  std::vector<SiteBelief> beliefs;
  RoundRobinCounts sensing_counts;
  Rng noise_rng;
  Rng solver_rng;
  Rng baseline_rng;
  bool terminated = false;

  int next_round() const noexcept { return env.state.round + 1; }
};

inline Episode start_episode(const ScenarioConfig& config, Environment env) {
  config.validate();
  if (env.state.size() != config.num_sites || env.sites.size() != config.num_sites)
    throw ConfigError("num_sites: environment does not match configuration", "num_sites");
  const BeliefParams bp = config.effective_belief();
  std::vector<SiteBelief> beliefs(config.num_sites, prior_belief(bp));
  return Episode{config,
                 bp,
                 std::move(env),
                 std::move(beliefs),
                 RoundRobinCounts(config.num_sites),
                 Rng(config.seed, StreamPurpose::noise),
                 Rng(config.seed, StreamPurpose::solver),
                 Rng(config.seed, StreamPurpose::baseline),
                 false};
}

inline Episode start_episode(const ScenarioConfig& config) {
  config.validate();
  Rng init(config.seed, StreamPurpose::init);
  return start_episode(config, init_environment(config.num_sites, config.env, init));
}

namespace detail {

inline PhasePlan to_site_plan(const vrpp::Instance& inst, const vrpp::Solution& sol) {
  PhasePlan plan;
  plan.objective = sol.objective;
  plan.routes.reserve(sol.routes.size());
  for (const auto& r : sol.routes) {
    std::vector<std::size_t> sites;
    sites.reserve(r.size());
    for (std::size_t node : r) sites.push_back(inst.node(node).site);
    plan.routes.push_back(std::move(sites));
  }
  return plan;
}

inline vrpp::Solution solve_phase(const vrpp::Instance& inst, Rng& rng, std::size_t budget) {
  vrpp::HeuristicOptions opts;
  opts.budget = budget;
  return vrpp::solve_heuristic(inst, rng, opts);
}

// UGV planning instance for this round's cleaning targets.
inline vrpp::Instance cleaning_instance(std::span<const CleaningTarget> targets, std::span<const SiteBelief> beliefs,
                                        std::span<const SiteGeometry> sites, const ScenarioConfig& cfg) {
  const double q_unit = cfg.vehicles.unit_capacity;
  std::vector<vrpp::Node> nodes;
  for (const auto& t : targets) {
    const double mu = beliefs[t.site].mean;
    vrpp::Node nd;
    nd.site = sites[t.site].id;
    nd.position = sites[t.site].position;
    if (cfg.visit_model == CleaningVisitModel::uniform) {
      nd.value = t.reward;
      nd.demand = t.demand;
      nd.max_visits = static_cast<int>(cfg.num_ugvs);
      nodes.push_back(nd);
      continue;
    }
    const auto slots = std::min<std::size_t>(cfg.num_ugvs, static_cast<std::size_t>(std::ceil(mu / q_unit)));
    for (std::size_t k = 0; k < slots; ++k) {
      nd.demand = std::min(q_unit, mu - static_cast<double>(k) * q_unit);
      if (!(nd.demand > 0.0)) break;
      nd.value = mu * nd.demand;
      nd.max_visits = 1;
      nodes.push_back(nd);
    }
  }
  std::vector<vrpp::Vehicle> ugvs(cfg.num_ugvs, vrpp::Vehicle{vrpp::kUnlimited, cfg.vehicles.capacity});
  return vrpp::Instance(vrpp::Mode::cleaning, std::move(nodes), std::move(ugvs), cfg.vehicles.cleaning_travel_cost);
}

}  // namespace detail

// One full round: sense, update beliefs, clean, handle residuals, check for
// termination, then let hazards evolve.
inline RoundRecord run_round(Episode& ep) {
  if (ep.terminated) throw ContractError("run_round: episode already terminated");
  const ScenarioConfig& cfg = ep.config;
  const BeliefParams& bp = ep.belief_params;
  const std::size_t n = cfg.num_sites;
  EnvState& truth = ep.env.state;
  const bool oracle = cfg.strategy == Strategy::oracle;

  RoundRecord rec;
  rec.round = ep.next_round();
  rec.hazard_start = truth.hazards;

  // Sensing values and routes.
  const SensingParams sp{cfg.vehicles.beta, cfg.vehicles.kappa};
  const auto values = sensing_values(cfg.strategy, ep.beliefs, ep.env.sites, truth.cleared, sp, &ep.sensing_counts,
                                     oracle ? &truth : nullptr, ep.baseline_rng);
  const vrpp::FleetConfig uavs{cfg.num_uavs, cfg.vehicles.max_distance, vrpp::kUnlimited};
  const auto sensing_inst =
      vrpp::build_instance(vrpp::Mode::sensing, values, {}, {}, ep.env.sites, uavs, cfg.vehicles.travel_cost);
  const auto sensing_sol = detail::solve_phase(sensing_inst, ep.solver_rng, cfg.solver_budget);
  rec.sensing = detail::to_site_plan(sensing_inst, sensing_sol);

  std::vector<std::size_t> sensed_sites;
  for (const auto& r : rec.sensing.routes) sensed_sites.insert(sensed_sites.end(), r.begin(), r.end());
  std::sort(sensed_sites.begin(), sensed_sites.end());
  rec.sensed.assign(n, false);
  for (std::size_t s : sensed_sites) rec.sensed[s] = true;
  ep.sensing_counts.record_visits(sensed_sites);
  rec.observations = observe(truth, sensed_sites, ep.noise_rng);

  // Belief update: observed sites fuse their history, the rest extrapolate.
  if (!oracle) {
    const int now = truth.round;
    std::vector<std::vector<Observation>> fresh(n);
    for (const auto& o : rec.observations) fresh[o.site].push_back(o);
    for (std::size_t i = 0; i < n; ++i) {
      if (truth.cleared[i]) continue;
      if (!fresh[i].empty()) ep.beliefs[i] = absorb_observations(std::move(ep.beliefs[i]), fresh[i], now, bp);
      else ep.beliefs[i] = propagate_unobserved(std::move(ep.beliefs[i]), 1, bp);
    }
  }

  // Cleaning targets and routes.
  std::vector<bool> eligible(n);
  for (std::size_t i = 0; i < n; ++i) eligible[i] = !truth.cleared[i];
  const auto targets = cleaning_targets(ep.beliefs, cfg.vehicles.unit_capacity, eligible);
  const auto cleaning_inst = detail::cleaning_instance(targets, ep.beliefs, ep.env.sites, cfg);
  const auto cleaning_sol = detail::solve_phase(cleaning_inst, ep.solver_rng, cfg.solver_budget);
  rec.cleaning = detail::to_site_plan(cleaning_inst, cleaning_sol);

  std::vector<CleaningVisit> visits;
  for (std::size_t m = 0; m < cleaning_sol.routes.size(); ++m)
    for (std::size_t node : cleaning_sol.routes[m]) {
      const auto& nd = cleaning_inst.node(node);
      visits.push_back({m, nd.site, nd.demand, 0.0});
    }
  CleaningResult cleaned;
  if (cfg.use_spare_capacity) {
    std::vector<double> spare(cfg.num_ugvs, cfg.vehicles.capacity);
    for (const auto& v : visits) spare[v.vehicle] -= v.planned_removal;
    for (auto& s : spare) s = std::max(s, 0.0);
    cleaned = apply_cleaning_with_spare(truth, std::move(visits), std::move(spare), cfg.vehicles.unit_capacity);
  } else {
    cleaned = apply_cleaning(truth, std::move(visits));
  }
  truth = std::move(cleaned.state);
  rec.cleaning_visits = std::move(cleaned.visits);
  rec.removed = cleaned.total_removed;
  rec.removed_by_site.assign(n, 0.0);
  rec.removed_per_vehicle.assign(cfg.num_ugvs, 0.0);
  std::vector<bool> cleaned_site(n, false);
  for (const auto& v : rec.cleaning_visits) {
    rec.removed_by_site[v.site] += v.actual_removal;
    rec.removed_per_vehicle[v.vehicle] += v.actual_removal;
    cleaned_site[v.site] = true;
    ep.beliefs[v.site] =
        apply_planned_removal(std::move(ep.beliefs[v.site]), v.planned_removal, cfg.rebase_history_on_cleaning);
  }

  // Confirmed-clean collapse and residual-hazard boost.
  for (std::size_t i = 0; i < n; ++i) {
    if (!cleaned_site[i]) continue;
    if (cleaned.fully_clean[i]) {
      ep.beliefs[i] = collapse_confirmed_clean(std::move(ep.beliefs[i]));
    } else if (ep.beliefs[i].mean == 0.0 && truth.hazards[i] > 0.0) {
      ep.beliefs[i] = boost_uncertainty(std::move(ep.beliefs[i]), bp);
      rec.residual_boost_sites.push_back(i);
    }
  }

  std::size_t touched = 0;
  for (std::size_t i = 0; i < n; ++i) touched += (rec.sensed[i] || cleaned_site[i]) ? 1 : 0;
  if (touched > 0) rec.sensing_ratio = static_cast<double>(sensed_sites.size()) / static_cast<double>(touched);

  rec.hazard_end = truth.hazards;
  rec.belief_mean.resize(n);
  rec.belief_var.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rec.belief_mean[i] = ep.beliefs[i].mean;
    rec.belief_var[i] = ep.beliefs[i].variance;
  }

  rec.all_clear = truth.all_clear();
  if (rec.all_clear) {
    ep.terminated = true;
    truth.round += 1;
  } else {
    truth = step_hazards(truth, ep.env.sites);
  }
  return rec;
}

inline Metrics compute_metrics(const std::vector<RoundRecord>& records, const ScenarioConfig& config) {
  if (records.empty()) throw ContractError("compute_metrics: no rounds recorded");
  Metrics m;
  m.termination_round = config.max_rounds;
  for (const auto& r : records)
    if (r.all_clear) {
      m.termination_round = r.round;
      m.completed = true;
      break;
    }
  m.termination_round = std::min(m.termination_round, records.back().round);

  double removed_total = 0.0;
  for (const auto& r : records) {
    const std::size_t n = r.hazard_end.size();
    double start = 0.0, remaining = 0.0, abs_err = 0.0, var = 0.0;
    for (double h : r.hazard_start) start += h;
    for (std::size_t i = 0; i < n; ++i) {
      remaining += r.hazard_end[i];
      abs_err += std::abs(r.belief_mean[i] - r.hazard_end[i]);
      var += r.belief_var[i];
    }
    if (r.round <= m.termination_round) {
      m.cumulative_hazard += start;
      removed_total += r.removed;
    }
    const double dn = static_cast<double>(std::max<std::size_t>(n, 1));
    m.remaining_hazard.push_back(remaining);
    m.mae.push_back(abs_err / dn);
    m.mean_variance.push_back(var / dn);
    m.sensing_ratio.push_back(r.sensing_ratio);
    m.removed_per_vehicle.push_back(r.removed_per_vehicle);
  }
  m.cleaning_rate = removed_total / static_cast<double>(m.termination_round);
  const auto last = static_cast<std::size_t>(m.termination_round - records.front().round);
  const std::size_t idx = std::min(last, records.size() - 1);
  m.final_mae = m.mae[idx];
  m.final_mean_variance = m.mean_variance[idx];
  return m;
}

inline EpisodeResult run_episode(Episode ep) {
  EpisodeResult result;
  result.config = ep.config;
  while (!ep.terminated && ep.next_round() <= ep.config.max_rounds) result.rounds.push_back(run_round(ep));
  result.metrics = compute_metrics(result.rounds, result.config);
  return result;
}

inline EpisodeResult run_episode(const ScenarioConfig& config) { return run_episode(start_episode(config)); }

}  // namespace hazard
