#pragma once

// Per-site Gaussian hazard beliefs: time-weighted Bayesian fusion of the
// observation history, extrapolation for unvisited sites, and the variance
// boost applied when a site believed clean turns out not to be.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hazard/env.hpp"
#include "hazard/errors.hpp"

namespace hazard {

struct BeliefParams {
  double decay = 0.5;        // lambda
  double noise_var = 25.0;   // sigma_eps^2
  double inflation = 0.5;    // gamma
  double var_cap = 400.0;    // sigma_max^2
  double smoothing = 0.3;    // alpha
  double boost = 100.0;      // zeta
  double prior_mean = 0.0;
  double prior_var = 100.0;
  double mean_cap = 200.0;   // K; beliefs are clamped to [0, mean_cap]

  friend bool operator==(const BeliefParams&, const BeliefParams&) = default;

  void validate() const {
    auto require = [](bool ok, const char* key, const std::string& msg) {
      if (!ok) throw ConfigError(std::string(key) + ": " + msg, key);
    };
    require(std::isfinite(decay) && decay > 0.0, "decay", "must be > 0");
    require(std::isfinite(noise_var) && noise_var > 0.0, "noise_var", "must be > 0");
    require(std::isfinite(inflation) && inflation >= 0.0, "inflation", "must be >= 0");
    require(std::isfinite(smoothing) && smoothing >= 0.0 && smoothing <= 1.0, "smoothing", "must lie in [0, 1]");
    require(std::isfinite(boost) && boost >= 0.0, "boost", "must be >= 0");
    require(std::isfinite(prior_var) && prior_var > 0.0, "prior_var", "must be > 0");
    require(std::isfinite(var_cap) && var_cap >= prior_var, "var_cap", "must be >= prior_var");
    require(std::isfinite(mean_cap) && mean_cap > 0.0, "mean_cap", "must be > 0");
    require(std::isfinite(prior_mean) && prior_mean >= 0.0 && prior_mean <= mean_cap, "prior_mean",
            "must lie in [0, mean_cap]");
  }
};

struct SiteBelief {
  double mean = 0.0;
  double variance = 100.0;
  double gradient = 0.0;
  std::vector<Observation> history;  // nondecreasing in time
  std::optional<int> last_obs_round;
};

inline SiteBelief prior_belief(const BeliefParams& p) { return SiteBelief{p.prior_mean, p.prior_var, 0.0, {}, {}}; }

// Observations older than this weight are dropped from the history.
inline constexpr double kMinObservationWeight = 1e-9;

// Variance assigned to a site once a UGV confirms it fully clean.
inline constexpr double kConfirmedCleanVariance = 1e-6;

inline double effective_sample_size(std::span<const double> weights) {
  double sum = 0.0, sum_sq = 0.0;
  for (double w : weights) {
    sum += w;
    sum_sq += w * w;
  }
  if (!(sum_sq > 0.0)) throw ContractError("effective_sample_size: weights must not all be zero");
  return sum * sum / sum_sq;
}

// Fuse the retained history into the current belief, which acts as the prior.
inline SiteBelief tw_bayes_update(SiteBelief belief, int now, const BeliefParams& p) {
  const double horizon = -std::log(kMinObservationWeight) / p.decay;
  std::erase_if(belief.history,
                [&](const Observation& o) { return static_cast<double>(now - o.time) > horizon; });
  if (belief.history.empty()) throw ContractError("tw_bayes_update: observation history is empty");

  std::vector<double> weights;
  weights.reserve(belief.history.size());
  double weight_sum = 0.0, weighted_obs = 0.0;
  for (const auto& o : belief.history) {
    const double w = std::exp(-p.decay * static_cast<double>(now - o.time));
    weights.push_back(w);
    weight_sum += w;
    weighted_obs += w * o.value;
  }
  const double y_bar = weighted_obs / weight_sum;
  const double n_eff = effective_sample_size(weights);

  const double post_var = 1.0 / (1.0 / belief.variance + n_eff / p.noise_var);
  const double post_mean = post_var * (belief.mean / belief.variance + n_eff * y_bar / p.noise_var);

  belief.variance = post_var;
  belief.mean = std::clamp(post_mean, 0.0, p.mean_cap);
  belief.last_obs_round = belief.history.back().time;
  return belief;
}

// Advance an unvisited site's belief by `dt` rounds.
inline SiteBelief propagate_unobserved(SiteBelief belief, int dt, const BeliefParams& p) {
  if (dt < 0) throw ContractError("propagate_unobserved: dt must be >= 0");
  if (dt == 0) return belief;
  const double steps = static_cast<double>(dt);
  belief.variance = std::min((1.0 + p.inflation * steps) * belief.variance, p.var_cap);
  belief.mean = std::clamp(belief.mean + belief.gradient * steps, 0.0, p.mean_cap);
  return belief;
}

// Exponentially smoothed finite-difference trend between two readings.
inline SiteBelief update_gradient(SiteBelief belief, double y_new, double y_prev, int dt, const BeliefParams& p) {
  if (dt < 1) throw ContractError("update_gradient: dt must be >= 1");
  belief.gradient = p.smoothing * (y_new - y_prev) / static_cast<double>(dt) + (1.0 - p.smoothing) * belief.gradient;
  return belief;
}

inline SiteBelief boost_uncertainty(SiteBelief belief, const BeliefParams& p) {
  belief.variance = std::min(belief.variance + p.boost, p.var_cap);
  return belief;
}

inline SiteBelief collapse_confirmed_clean(SiteBelief belief) {
  belief.mean = 0.0;
  belief.variance = kConfirmedCleanVariance;
  belief.gradient = 0.0;
  belief.history.clear();
  return belief;
}

// Bookkeeping after a cleaning visit planned to remove `amount`. With
// `rebase_history` the retained readings are shifted down by the same amount,
// so later updates and gradients see the post-cleaning level instead of
// treating the removal as a natural decline.
inline SiteBelief apply_planned_removal(SiteBelief belief, double amount, bool rebase_history) {
  if (!(amount >= 0.0)) throw ContractError("apply_planned_removal: amount must be >= 0");
  belief.mean = std::max(belief.mean - amount, 0.0);
  if (rebase_history)
    for (auto& o : belief.history) o.value -= amount;
  return belief;
}

// Append this round's readings and refresh the belief: gradient from the two
// newest readings, then the batch time-weighted update.
inline SiteBelief absorb_observations(SiteBelief belief, std::span<const Observation> fresh, int now,
                                      const BeliefParams& p) {
  for (const auto& o : fresh) {
    if (!belief.history.empty() && o.time < belief.history.back().time)
      throw ContractError("absorb_observations: observations must arrive in time order");
    belief.history.push_back(o);
    const std::size_t k = belief.history.size();
    if (k >= 2) {
      const auto& prev = belief.history[k - 2];
      const auto& cur = belief.history[k - 1];
      if (cur.time > prev.time) belief = update_gradient(std::move(belief), cur.value, prev.value, cur.time - prev.time, p);
    }
  }
  return tw_bayes_update(std::move(belief), now, p);
}

}  // namespace hazard
