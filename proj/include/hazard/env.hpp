#pragma once

// Ground-truth hazard field: site layout, hazard evolution, sensing noise and
// the physical effect of cleaning visits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hazard/errors.hpp"
#include "hazard/geometry.hpp"
#include "hazard/rng.hpp"

namespace hazard {

struct EnvParams {
  double saturation = 200.0;     // K
  double spatial_coeff = 0.01;   // phi
  double spatial_unit_km = 1.0;  // length unit of the spillover denominator
  double growth_min = 0.0;       // rho ~ U(growth_min, growth_max)
  double growth_max = 0.1;
  double hazard_min = 0.0;       // H_0 ~ U(hazard_min, hazard_max)
  double hazard_max = 100.0;
  double noise_std = 5.0;        // sigma_eps
  double map_min = -0.5;         // square [map_min, map_max]^2 km
  double map_max = 0.5;

  friend bool operator==(const EnvParams&, const EnvParams&) = default;

  void validate() const {
    auto require = [](bool ok, const char* key, const std::string& msg) {
      if (!ok) throw ConfigError(std::string(key) + ": " + msg, key);
    };
    require(std::isfinite(map_min) && std::isfinite(map_max), "map_min", "map bounds must be finite");
    require(map_min <= map_max, "map_min", "map_min must not exceed map_max");
    require(std::isfinite(saturation) && saturation > 0.0, "saturation", "must be > 0");
    require(std::isfinite(spatial_coeff) && spatial_coeff >= 0.0, "spatial_coeff", "must be >= 0");
    require(std::isfinite(spatial_unit_km) && spatial_unit_km > 0.0, "spatial_unit_km", "must be > 0");
    require(std::isfinite(growth_min) && growth_min >= 0.0, "growth_min", "must be >= 0");
    require(std::isfinite(growth_max) && growth_max >= growth_min, "growth_max", "must be >= growth_min");
    require(std::isfinite(hazard_min) && hazard_min >= 0.0, "hazard_min", "must be >= 0");
    require(std::isfinite(hazard_max) && hazard_max >= hazard_min, "hazard_max", "must be >= hazard_min");
    require(std::isfinite(noise_std) && noise_std >= 0.0, "noise_std", "must be >= 0");
  }
};

struct SiteGeometry {
  std::size_t id = 0;
  Point position;
  double depot_distance = 0.0;
};

struct EnvState {
  std::vector<double> hazards;
  std::vector<double> growth_rates;
  std::vector<bool> cleared;
  double saturation = 200.0;
  double spatial_coeff = 0.01;
  double spatial_unit_km = 1.0;
  double noise_std = 5.0;
  int round = 0;

  std::size_t size() const noexcept { return hazards.size(); }

  bool all_clear() const noexcept {
    return std::all_of(hazards.begin(), hazards.end(), [](double h) { return h == 0.0; });
  }

  double total_hazard() const noexcept {
    double s = 0.0;
    for (double h : hazards) s += h;
    return s;
  }

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

struct Observation {
  std::size_t site = 0;
  double value = 0.0;
  int time = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct CleaningVisit {
  std::size_t vehicle = 0;
  std::size_t site = 0;
  double planned_removal = 0.0;
  double actual_removal = 0.0;
};

struct Environment {
  EnvState state;
  std::vector<SiteGeometry> sites;
};

inline std::vector<SiteGeometry> make_geometry(std::span<const Point> positions) {
  std::vector<SiteGeometry> sites;
  sites.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i)
    sites.push_back({i, positions[i], norm(positions[i])});
  return sites;
}

// Draw a fresh environment. Positions first, then initial hazards, then growth
// rates, so layouts stay fixed when only the hazard ranges change.
inline Environment init_environment(std::size_t num_sites, const EnvParams& params, Rng& rng) {
  if (num_sites < 1) throw ConfigError("num_sites: must be >= 1", "num_sites");
  params.validate();

  std::vector<Point> positions(num_sites);
  for (auto& p : positions) {
    p.x = rng.uniform(params.map_min, params.map_max);
    p.y = rng.uniform(params.map_min, params.map_max);
  }

  Environment env;
  env.sites = make_geometry(positions);
  env.state.hazards.resize(num_sites);
  env.state.growth_rates.resize(num_sites);
  for (auto& h : env.state.hazards) h = rng.uniform(params.hazard_min, params.hazard_max);
  for (auto& r : env.state.growth_rates) r = rng.uniform(params.growth_min, params.growth_max);
  env.state.cleared.assign(num_sites, false);
  env.state.saturation = params.saturation;
  env.state.spatial_coeff = params.spatial_coeff;
  env.state.spatial_unit_km = params.spatial_unit_km;
  env.state.noise_std = params.noise_std;
  env.state.round = 0;
  return env;
}

// One round of logistic growth plus distance-attenuated spillover, clamped to
// [0, K]. Cleared sites stay frozen at zero and are decoupled from neighbours.
inline EnvState step_hazards(const EnvState& state, std::span<const SiteGeometry> sites) {
  const std::size_t n = state.size();
  if (sites.size() != n) throw ContractError("step_hazards: geometry/state size mismatch");
  EnvState next = state;
  const double k = state.saturation;
  for (std::size_t i = 0; i < n; ++i) {
    if (state.cleared[i]) {
      next.hazards[i] = 0.0;
      continue;
    }
    const double h = state.hazards[i];
    double spill = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || state.cleared[j]) continue;
      const double d = distance(sites[i].position, sites[j].position) / state.spatial_unit_km;
      spill += state.hazards[j] / (d + 1.0);
    }
    const double grown = h + state.growth_rates[i] * h * (1.0 - h / k) + state.spatial_coeff * spill;
    next.hazards[i] = std::clamp(grown, 0.0, k);
  }
  next.round = state.round + 1;
  return next;
}

// Noisy point readings at the requested sites, stamped with the current round.
// Readings are not clamped; negative values are legitimate sensor output.
inline std::vector<Observation> observe(const EnvState& state, std::span<const std::size_t> sites, Rng& rng) {
  std::vector<Observation> out;
  out.reserve(sites.size());
  for (std::size_t s : sites) {
    if (s >= state.size()) throw InputError("observe: site index " + std::to_string(s) + " out of range");
    const double noise = state.noise_std * rng.standard_normal();
    out.push_back({s, state.hazards[s] + noise, state.round});
  }
  return out;
}

struct CleaningResult {
  EnvState state;
  std::vector<CleaningVisit> visits;   // actual_removal filled in
  std::vector<bool> fully_clean;       // per site; true iff visited and now zero
  double total_removed = 0.0;
};

// Execute visits in list order; each removes min(planned, remaining).
inline CleaningResult apply_cleaning(EnvState state, std::vector<CleaningVisit> visits) {
  const std::size_t n = state.size();
  std::vector<bool> visited(n, false);
  double total = 0.0;
  for (auto& v : visits) {
    if (v.site >= n) throw InputError("apply_cleaning: site index " + std::to_string(v.site) + " out of range");
    if (!(v.planned_removal >= 0.0)) throw ContractError("apply_cleaning: planned removal must be >= 0");
    double& h = state.hazards[v.site];
    v.actual_removal = std::min(v.planned_removal, h);
    h -= v.actual_removal;
    if (h < 0.0) h = 0.0;
    total += v.actual_removal;
    visited[v.site] = true;
  }
  std::vector<bool> report(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (visited[i] && state.hazards[i] == 0.0) {
      report[i] = true;
      state.cleared[i] = true;
    }
  }
  return {std::move(state), std::move(visits), std::move(report), total};
}

// Like apply_cleaning, but a vehicle may spend capacity its plan left unused:
// each visit's removal limit is raised toward `unit_cap` by whatever remains of
// `spare[vehicle]`. Spare capacity is only consumed by hazard actually removed
// beyond the original plan, so later stops keep what earlier stops did not need.
inline CleaningResult apply_cleaning_with_spare(EnvState state, std::vector<CleaningVisit> visits,
                                                std::vector<double> spare, double unit_cap) {
  const std::size_t n = state.size();
  std::vector<bool> visited(n, false);
  double total = 0.0;
  for (auto& v : visits) {
    if (v.site >= n) throw InputError("apply_cleaning: site index " + std::to_string(v.site) + " out of range");
    if (v.vehicle >= spare.size()) throw InputError("apply_cleaning: vehicle index out of range");
    if (!(v.planned_removal >= 0.0)) throw ContractError("apply_cleaning: planned removal must be >= 0");
    const double base = v.planned_removal;
    const double extra = std::clamp(std::min(unit_cap - base, spare[v.vehicle]), 0.0, unit_cap);
    v.planned_removal = base + extra;
    double& h = state.hazards[v.site];
    v.actual_removal = std::min(v.planned_removal, h);
    h -= v.actual_removal;
    if (h < 0.0) h = 0.0;
    spare[v.vehicle] -= std::max(0.0, v.actual_removal - base);
    total += v.actual_removal;
    visited[v.site] = true;
  }
  std::vector<bool> report(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (visited[i] && state.hazards[i] == 0.0) {
      report[i] = true;
      state.cleared[i] = true;
    }
  }
  return {std::move(state), std::move(visits), std::move(report), total};
}

}  // namespace hazard
