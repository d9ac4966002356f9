#pragma once

// File formats for episode output: the per-round trace CSV, the per-episode
// summary JSON and the multi-strategy comparison report.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include <json.hpp>

#include "hazard/config.hpp"
#include "hazard/dispatch.hpp"
#include "hazard/errors.hpp"

namespace hazard {

inline constexpr const char* kTraceHeader = "round,site,hazard,belief_mean,belief_var,sensed,removed";

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// One row per (round, site). `hazard` is the post-cleaning truth, the state the
// belief columns are compared against.
inline void write_trace(std::ostream& out, const EpisodeResult& result) {
  out << kTraceHeader << '\n';
  for (const auto& r : result.rounds)
    for (std::size_t i = 0; i < r.hazard_end.size(); ++i)
      out << r.round << ',' << i << ',' << format_double(r.hazard_end[i]) << ',' << format_double(r.belief_mean[i])
          << ',' << format_double(r.belief_var[i]) << ',' << (r.sensed[i] ? 1 : 0) << ','
          << format_double(r.removed_by_site[i]) << '\n';
}

inline std::string trace_string(const EpisodeResult& result) {
  std::ostringstream ss;
  write_trace(ss, result);
  return ss.str();
}

inline json metrics_to_json(const Metrics& m) {
  json ratio = json::array();
  for (const auto& r : m.sensing_ratio) ratio.push_back(r ? json(*r) : json(nullptr));
  return {{"termination_round", m.termination_round},
          {"completed", m.completed},
          {"cumulative_hazard", m.cumulative_hazard},
          {"cleaning_rate", m.cleaning_rate},
          {"final_mae", m.final_mae},
          {"final_mean_variance", m.final_mean_variance},
          {"series",
           {{"remaining_hazard", m.remaining_hazard},
            {"mae", m.mae},
            {"mean_variance", m.mean_variance},
            {"sensing_ratio", ratio},
            {"removed_per_vehicle", m.removed_per_vehicle}}}};
}

inline json summary_json(const EpisodeResult& result) {
  return {{"strategy", std::string(to_string(result.config.strategy))},
          {"seed", result.config.seed},
          {"config", config_to_json(result.config)},
          {"metrics", metrics_to_json(result.metrics)}};
}

inline std::string summary_string(const EpisodeResult& result) { return summary_json(result).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Comparison report

struct ReportRow {
  std::size_t entry = 0;  // index into the report's strategy list
  std::string strategy;
  std::uint64_t seed = 0;
  int termination_round = 0;
  bool completed = false;
  double cumulative_hazard = 0.0;
  double cleaning_rate = 0.0;
  double final_mae = 0.0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double median = 0.0;

  friend bool operator==(const Stat&, const Stat&) = default;
};

inline const char* const kReportMetrics[] = {"termination_round", "cumulative_hazard", "cleaning_rate", "final_mae"};

struct StrategyAggregate {
  std::size_t entry = 0;
  std::string strategy;
  std::size_t runs = 0;
  std::size_t completed = 0;
  std::map<std::string, Stat> stats;  // keyed by kReportMetrics

  friend bool operator==(const StrategyAggregate&, const StrategyAggregate&) = default;
};

struct Report {
  std::string scenario;
  std::vector<std::string> strategies;
  std::vector<ReportRow> rows;
  std::vector<StrategyAggregate> aggregates;
  // Percent reduction of BUCB mean T_end relative to each uninformed baseline.
  std::map<std::string, double> bucb_reduction_pct;
  // Non-oracle strategy whose mean is nearest the oracle's, per metric.
  std::map<std::string, std::string> closest_to_oracle;
};

inline Stat compute_stat(std::vector<double> xs) {
  if (xs.empty()) throw ContractError("compute_stat: no samples");
  Stat s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(xs.size()));
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  s.median = n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
  return s;
}

inline double row_metric(const ReportRow& r, const std::string& metric) {
  if (metric == "termination_round") return r.termination_round;
  if (metric == "cumulative_hazard") return r.cumulative_hazard;
  if (metric == "cleaning_rate") return r.cleaning_rate;
  if (metric == "final_mae") return r.final_mae;
  throw ContractError("row_metric: unknown metric " + metric);
}

inline ReportRow make_row(std::size_t entry, const EpisodeResult& result) {
  const auto& m = result.metrics;
  return {entry,         std::string(to_string(result.config.strategy)),
          result.config.seed, m.termination_round,
          m.completed,   m.cumulative_hazard,
          m.cleaning_rate, m.final_mae};
}

inline std::vector<StrategyAggregate> aggregate_rows(const std::vector<std::string>& strategies,
                                                     const std::vector<ReportRow>& rows) {
  std::vector<StrategyAggregate> out;
  for (std::size_t e = 0; e < strategies.size(); ++e) {
    StrategyAggregate agg;
    agg.entry = e;
    agg.strategy = strategies[e];
    std::vector<const ReportRow*> mine;
    for (const auto& r : rows)
      if (r.entry == e) mine.push_back(&r);
    if (mine.empty()) throw InputError("report: strategy entry " + std::to_string(e) + " has no rows");
    agg.runs = mine.size();
    for (const auto* r : mine) agg.completed += r->completed ? 1 : 0;
    for (const char* metric : kReportMetrics) {
      std::vector<double> xs;
      for (const auto* r : mine) xs.push_back(row_metric(*r, metric));
      agg.stats[metric] = compute_stat(std::move(xs));
    }
    out.push_back(std::move(agg));
  }
  return out;
}

inline Report make_report(std::string scenario, std::vector<std::string> strategies, std::vector<ReportRow> rows) {
  Report rep;
  rep.scenario = std::move(scenario);
  rep.strategies = std::move(strategies);
  std::sort(rows.begin(), rows.end(),
            [](const ReportRow& a, const ReportRow& b) { return std::tie(a.entry, a.seed) < std::tie(b.entry, b.seed); });
  rep.rows = std::move(rows);
  rep.aggregates = aggregate_rows(rep.strategies, rep.rows);

  auto first = [&](const std::string& name) -> const StrategyAggregate* {
    for (const auto& a : rep.aggregates)
      if (a.strategy == name) return &a;
    return nullptr;
  };
  if (const auto* bucb = first("bucb")) {
    const double b = bucb->stats.at("termination_round").mean;
    for (const char* base : {"random", "round_robin"})
      if (const auto* other = first(base)) {
        const double o = other->stats.at("termination_round").mean;
        if (o > 0.0) rep.bucb_reduction_pct[base] = 100.0 * (o - b) / o;
      }
  }
  if (const auto* oracle = first("oracle")) {
    for (const char* metric : kReportMetrics) {
      const double target = oracle->stats.at(metric).mean;
      const StrategyAggregate* best = nullptr;
      double best_gap = 0.0;
      for (const auto& a : rep.aggregates) {
        if (a.strategy == "oracle") continue;
        const double gap = std::abs(a.stats.at(metric).mean - target);
        if (!best || gap < best_gap) best = &a, best_gap = gap;
      }
      if (best) rep.closest_to_oracle[metric] = best->strategy;
    }
  }
  return rep;
}

inline json stat_to_json(const Stat& s) { return {{"mean", s.mean}, {"std", s.std}, {"median", s.median}}; }

inline json report_to_json(const Report& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"entry", r.entry},
                    {"strategy", r.strategy},
                    {"seed", r.seed},
                    {"termination_round", r.termination_round},
                    {"completed", r.completed},
                    {"cumulative_hazard", r.cumulative_hazard},
                    {"cleaning_rate", r.cleaning_rate},
                    {"final_mae", r.final_mae}});
  json aggs = json::array();
  for (const auto& a : rep.aggregates) {
    json stats = json::object();
    for (const auto& [k, s] : a.stats) stats[k] = stat_to_json(s);
    aggs.push_back({{"entry", a.entry},
                    {"strategy", a.strategy},
                    {"runs", a.runs},
                    {"completed", a.completed},
                    {"stats", stats}});
  }
  return {{"scenario", rep.scenario},
          {"strategies", rep.strategies},
          {"aggregates", aggs},
          {"bucb_reduction_pct", rep.bucb_reduction_pct},
          {"closest_to_oracle", rep.closest_to_oracle},
          {"rows", rows}};
}

inline std::string report_string(const Report& rep) { return report_to_json(rep).dump(2) + "\n"; }

inline bool close_rel(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Parse a report and check that its aggregates match those recomputed from
// its rows.
inline Report report_from_json(const json& j) {
  try {
    Report rep;
    rep.scenario = j.at("scenario").get<std::string>();
    rep.strategies = j.at("strategies").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
      ReportRow row;
      row.entry = r.at("entry").get<std::size_t>();
      row.strategy = r.at("strategy").get<std::string>();
      row.seed = r.at("seed").get<std::uint64_t>();
      row.termination_round = r.at("termination_round").get<int>();
      row.completed = r.at("completed").get<bool>();
      row.cumulative_hazard = r.at("cumulative_hazard").get<double>();
      row.cleaning_rate = r.at("cleaning_rate").get<double>();
      row.final_mae = r.at("final_mae").get<double>();
      if (row.entry >= rep.strategies.size() || rep.strategies[row.entry] != row.strategy)
        throw InputError("report: row strategy does not match its entry");
      rep.rows.push_back(std::move(row));
    }
    for (const auto& a : j.at("aggregates")) {
      StrategyAggregate agg;
      agg.entry = a.at("entry").get<std::size_t>();
      agg.strategy = a.at("strategy").get<std::string>();
      agg.runs = a.at("runs").get<std::size_t>();
      agg.completed = a.at("completed").get<std::size_t>();
      for (const auto& [k, s] : a.at("stats").items())
        agg.stats[k] = {s.at("mean").get<double>(), s.at("std").get<double>(), s.at("median").get<double>()};
      rep.aggregates.push_back(std::move(agg));
    }
    rep.bucb_reduction_pct = j.at("bucb_reduction_pct").get<std::map<std::string, double>>();
    rep.closest_to_oracle = j.at("closest_to_oracle").get<std::map<std::string, std::string>>();

    const auto recomputed = aggregate_rows(rep.strategies, rep.rows);
    if (recomputed.size() != rep.aggregates.size()) throw InputError("report: aggregate count mismatch");
    for (std::size_t e = 0; e < recomputed.size(); ++e) {
      const auto& want = recomputed[e];
      const auto& got = rep.aggregates[e];
      if (got.entry != want.entry || got.strategy != want.strategy || got.runs != want.runs ||
          got.completed != want.completed)
        throw InputError("report: aggregate header mismatch for entry " + std::to_string(e));
      for (const char* metric : kReportMetrics) {
        const auto it = got.stats.find(metric);
        if (it == got.stats.end()) throw InputError(std::string("report: missing aggregate ") + metric);
        const Stat& w = want.stats.at(metric);
        if (!close_rel(it->second.mean, w.mean) || !close_rel(it->second.std, w.std) ||
            !close_rel(it->second.median, w.median))
          throw InputError("report: aggregate " + std::string(metric) + " for entry " + std::to_string(e) +
                           " does not match its rows");
      }
    }
    return rep;
  } catch (const json::exception& e) {
    throw InputError(std::string("report: malformed: ") + e.what());
  }
}

inline Report load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("report: cannot open '" + path + "'");
  try {
    return report_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw InputError(std::string("report: syntax error: ") + e.what());
  }
}

}  // namespace hazard
