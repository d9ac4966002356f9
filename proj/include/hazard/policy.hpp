#pragma once

// Visit values for the sensing phase (BUCB and the three baselines) and the
// reward/demand pair that drives the cleaning phase.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hazard/belief.hpp"
#include "hazard/env.hpp"
#include "hazard/errors.hpp"
#include "hazard/rng.hpp"

namespace hazard {

enum class Strategy { bucb, random, round_robin, oracle };

inline constexpr Strategy kAllStrategies[] = {Strategy::bucb, Strategy::random, Strategy::round_robin,
                                              Strategy::oracle};

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::bucb: return "bucb";
    case Strategy::random: return "random";
    case Strategy::round_robin: return "round_robin";
    case Strategy::oracle: return "oracle";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies)
    if (to_string(s) == name) return s;
  throw ConfigError("strategy: unknown strategy '" + std::string(name) + "'", "strategy");
}

struct SensingScore {
  std::size_t site = 0;
  double raw = 0.0;
  double adjusted = 0.0;
};

struct CleaningTarget {
  std::size_t site = 0;
  double reward = 0.0;
  double demand = 0.0;
  double removable = 0.0;
};

inline double bucb_score(double mean, double variance, double beta) {
  if (variance < 0.0) throw ContractError("bucb_score: variance must be >= 0");
  return mean + beta * std::sqrt(variance);
}

inline double distance_adjust(double raw, double depot_distance, double kappa) {
  return raw / (1.0 + kappa * depot_distance);
}

inline std::vector<CleaningTarget> cleaning_targets(std::span<const SiteBelief> beliefs, double q_unit,
                                                    const std::vector<bool>& eligible) {
  if (!(q_unit > 0.0)) throw ContractError("cleaning_targets: q_unit must be > 0");
  std::vector<CleaningTarget> out;
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    const double mu = beliefs[i].mean;
    if (!eligible[i] || !(mu > 0.0)) continue;
    const double removable = std::min(mu, q_unit);
    out.push_back({i, mu * removable, removable, removable});
  }
  return out;
}

// Sensing-count bookkeeping for the round-robin baseline.
class RoundRobinCounts {
 public:
  explicit RoundRobinCounts(std::size_t n = 0) : counts_(n, 0) {}

  void record_visits(std::span<const std::size_t> sites) {
    for (std::size_t s : sites) ++counts_.at(s);
  }

  // (c_max - c_i + 1) / (c_max + 1): 1 for the least-sensed site, never zero.
  double value(std::size_t site) const {
    const auto c_max = static_cast<double>(*std::max_element(counts_.begin(), counts_.end()));
    return (c_max - static_cast<double>(counts_[site]) + 1.0) / (c_max + 1.0);
  }

  const std::vector<long>& counts() const noexcept { return counts_; }
  std::vector<long>& counts() noexcept { return counts_; }

 private:
  std::vector<long> counts_;
};

struct SensingParams {
  double beta = 20.0;
  double kappa = 0.1;
};

// Oracle beliefs: mean pinned to truth, zero variance.
inline void pin_beliefs_to_truth(std::span<SiteBelief> beliefs, const EnvState& truth) {
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    beliefs[i].mean = truth.hazards[i];
    beliefs[i].variance = 0.0;
  }
}

// Per-site sensing visit value; 0 means the site is left out of the sensing
// problem. Cleared sites always get 0. The oracle reads `truth` and pins
// `beliefs` to it before scoring.
inline std::vector<double> sensing_values(Strategy strategy, std::span<SiteBelief> beliefs,
                                          std::span<const SiteGeometry> sites, const std::vector<bool>& cleared,
                                          const SensingParams& params, const RoundRobinCounts* counts,
                                          const EnvState* truth, Rng& rng) {
  const std::size_t n = beliefs.size();
  std::vector<double> values(n, 0.0);
  switch (strategy) {
    case Strategy::bucb:
      for (std::size_t i = 0; i < n; ++i) {
        if (cleared[i]) continue;
        const double raw = bucb_score(beliefs[i].mean, beliefs[i].variance, params.beta);
        values[i] = distance_adjust(raw, sites[i].depot_distance, params.kappa);
      }
      break;
    case Strategy::random:
      for (std::size_t i = 0; i < n; ++i) {
        if (cleared[i]) continue;
        values[i] = rng.uniform(0.0, 1.0);
      }
      break;
    case Strategy::round_robin:
      if (counts == nullptr) throw ConfigError("round_robin: sensing counts not initialised", "strategy");
      for (std::size_t i = 0; i < n; ++i) {
        if (cleared[i]) continue;
        values[i] = counts->value(i);
      }
      break;
    case Strategy::oracle:
      if (truth == nullptr) throw ConfigError("oracle: requested without ground-truth access", "strategy");
      pin_beliefs_to_truth(beliefs, *truth);
      for (std::size_t i = 0; i < n; ++i) {
        if (cleared[i]) continue;
        values[i] = distance_adjust(beliefs[i].mean, sites[i].depot_distance, params.kappa);
      }
      break;
  }
  return values;
}

}  // namespace hazard
