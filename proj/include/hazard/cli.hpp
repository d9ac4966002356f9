#pragma once

// Command-line front end: `run`, `compare` and `solve` subcommands.
//
// Exit codes: 0 success, 1 usage, 2 configuration, 3 runtime.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hazard/config.hpp"
#include "hazard/dispatch.hpp"
#include "hazard/errors.hpp"
#include "hazard/report.hpp"
#include "hazard/vrpp_exact.hpp"
#include "hazard/vrpp_heuristic.hpp"
#include "hazard/vrpp_io.hpp"

namespace hazard::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kConfig = 2, kRuntime = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SeedRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;  // inclusive

  std::size_t size() const noexcept { return static_cast<std::size_t>(last - first + 1); }
};

// "A..B" (inclusive) or a single seed "A".
inline SeedRange parse_seed_range(const std::string& text) {
  auto parse_u64 = [&](const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw UsageError("--seeds: expected A..B with nonnegative integers, got '" + text + "'");
    try {
      return static_cast<std::uint64_t>(std::stoull(s));
    } catch (const std::exception&) {
      throw UsageError("--seeds: value out of range in '" + text + "'");
    }
  };
  const auto dots = text.find("..");
  SeedRange r;
  if (dots == std::string::npos) {
    r.first = r.last = parse_u64(text);
  } else {
    r.first = parse_u64(text.substr(0, dots));
    r.last = parse_u64(text.substr(dots + 2));
  }
  if (r.last < r.first) throw UsageError("--seeds: empty range '" + text + "'");
  return r;
}

struct RunOptions {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::vector<std::string> strategies;
  std::string out_dir = "out";
  std::optional<std::size_t> budget;
  unsigned jobs = 0;  // 0: one per hardware thread
};

inline ScenarioConfig resolve_config(const RunOptions& opts) {
  if (opts.config_path.empty() == opts.preset_name.empty())
    throw UsageError("exactly one of --config or --preset is required");
  ScenarioConfig cfg = opts.preset_name.empty() ? parse_config(opts.config_path) : preset(opts.preset_name);
  if (opts.budget) {
    cfg.solver_budget = *opts.budget;
    cfg.validate();
  }
  return cfg;
}

inline SeedRange resolve_seeds(const RunOptions& opts, const ScenarioConfig& cfg) {
  if (opts.seed && !opts.seeds.empty()) throw UsageError("--seed and --seeds are mutually exclusive");
  if (opts.seed) return {*opts.seed, *opts.seed};
  if (!opts.seeds.empty()) return parse_seed_range(opts.seeds);
  return {cfg.seed, cfg.seed};
}

inline std::vector<Strategy> resolve_strategies(const std::vector<std::string>& names) {
  std::vector<Strategy> out;
  for (const auto& n : names) {
    try {
      out.push_back(parse_strategy(n));
    } catch (const ConfigError&) {
      throw UsageError("--strategy: unknown strategy '" + n + "' (expected bucb, random, round_robin or oracle)");
    }
  }
  return out;
}

struct Job {
  std::size_t entry = 0;
  ScenarioConfig config;
};

inline std::vector<Job> make_jobs(const ScenarioConfig& base, const std::vector<Strategy>& strategies,
                                  const SeedRange& seeds) {
  std::vector<Job> jobs;
  for (std::size_t e = 0; e < strategies.size(); ++e)
    for (std::uint64_t s = seeds.first;; ++s) {
      Job j{e, base};
      j.config.strategy = strategies[e];
      j.config.seed = s;
      jobs.push_back(std::move(j));
      if (s == seeds.last) break;
    }
  return jobs;
}

// Run `fn(i)` for i in [0, n) on a small thread pool. The first exception, by
// job index, is rethrown after all workers finish.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& fn) {
  unsigned workers = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      if (failed) break;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Files created during one command, removed again if the command fails.
class OutputTracker {
 public:
  void prepare_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::exists(dir, ec)) {
      std::filesystem::create_directories(dir, ec);
      if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
      created_dir_ = dir;
    } else if (!std::filesystem::is_directory(dir, ec)) {
      throw std::runtime_error("output path '" + dir.string() + "' is not a directory");
    }
  }

  void write(const std::filesystem::path& path, const std::string& content) {
    {
      std::lock_guard lock(mu_);
      files_.push_back(path);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    out.close();
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
  }

  void rollback() noexcept {
    std::error_code ec;
    for (const auto& f : files_) std::filesystem::remove(f, ec);
    if (created_dir_) std::filesystem::remove(*created_dir_, ec);
    files_.clear();
  }

 private:
  std::mutex mu_;
  std::vector<std::filesystem::path> files_;
  std::optional<std::filesystem::path> created_dir_;
};

inline std::string episode_stem(const ScenarioConfig& cfg) {
  return std::string(to_string(cfg.strategy)) + "_seed" + std::to_string(cfg.seed);
}

inline int cmd_run(const RunOptions& opts, std::ostream& out) {
  const ScenarioConfig base = resolve_config(opts);
  const SeedRange seeds = resolve_seeds(opts, base);
  auto strategies = resolve_strategies(opts.strategies);
  if (strategies.empty()) strategies.push_back(base.strategy);
  // Duplicate strategies would write the same files twice.
  std::vector<Strategy> unique;
  for (Strategy s : strategies)
    if (std::find(unique.begin(), unique.end(), s) == unique.end()) unique.push_back(s);
  const auto jobs = make_jobs(base, unique, seeds);

  OutputTracker files;
  const std::filesystem::path dir(opts.out_dir);
  std::vector<Metrics> metrics(jobs.size());
  try {
    files.prepare_dir(dir);
    parallel_for(jobs.size(), opts.jobs, [&](std::size_t i) {
      const auto result = run_episode(jobs[i].config);
      const std::string stem = episode_stem(jobs[i].config);
      files.write(dir / (stem + "_trace.csv"), trace_string(result));
      files.write(dir / (stem + "_summary.json"), summary_string(result));
      metrics[i] = result.metrics;
    });
  } catch (...) {
    files.rollback();
    throw;
  }
  std::size_t completed = 0;
  for (const auto& m : metrics) completed += m.completed ? 1 : 0;
  out << "ran " << jobs.size() << " episode(s), " << completed << " completed; output in " << dir.string() << "\n";
  return kSuccess;
}

inline void print_report_table(const Report& rep, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %6s %18s %24s %18s %16s\n", "strategy", "runs", "T_end", "cumulative_hazard",
                "cleaning_rate", "final_mae");
  out << line;
  for (const auto& a : rep.aggregates) {
    auto cell = [&](const char* metric) {
      const Stat& s = a.stats.at(metric);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f +- %.2f", s.mean, s.std);
      return std::string(buf);
    };
    std::snprintf(line, sizeof line, "%-12s %6zu %18s %24s %18s %16s\n", a.strategy.c_str(), a.runs,
                  cell("termination_round").c_str(), cell("cumulative_hazard").c_str(), cell("cleaning_rate").c_str(),
                  cell("final_mae").c_str());
    out << line;
  }
  for (const auto& [base, pct] : rep.bucb_reduction_pct) {
    std::snprintf(line, sizeof line, "bucb T_end reduction vs %s: %.1f%%\n", base.c_str(), pct);
    out << line;
  }
}

inline int cmd_compare(const RunOptions& opts, std::ostream& out) {
  const ScenarioConfig base = resolve_config(opts);
  const SeedRange seeds = resolve_seeds(opts, base);
  auto strategies = resolve_strategies(opts.strategies);
  if (opts.strategies.empty()) strategies.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
  if (strategies.size() < 2) throw UsageError("compare needs at least two --strategy entries");
  const auto jobs = make_jobs(base, strategies, seeds);

  OutputTracker files;
  const std::filesystem::path dir(opts.out_dir);
  std::vector<ReportRow> rows(jobs.size());
  Report rep;
  try {
    files.prepare_dir(dir);
    parallel_for(jobs.size(), opts.jobs,
                 [&](std::size_t i) { rows[i] = make_row(jobs[i].entry, run_episode(jobs[i].config)); });
    std::vector<std::string> names;
    for (Strategy s : strategies) names.emplace_back(to_string(s));
    rep = make_report(base.name, std::move(names), std::move(rows));
    files.write(dir / "report.json", report_string(rep));
  } catch (...) {
    files.rollback();
    throw;
  }
  print_report_table(rep, out);
  return kSuccess;
}

struct SolveOptions {
  std::string instance_path;
  std::string out_path;
  std::uint64_t seed = 0;
  std::size_t budget = 60;
  bool exact = false;
};

inline int cmd_solve(const SolveOptions& opts, std::ostream& out) {
  const auto inst = vrpp::load_instance(opts.instance_path);
  vrpp::Solution sol;
  if (opts.exact) {
    sol = vrpp::solve_exact(inst);
  } else {
    if (opts.budget < 1) throw UsageError("--budget must be >= 1");
    Rng rng(opts.seed, StreamPurpose::solver);
    vrpp::HeuristicOptions heur;
    heur.budget = opts.budget;
    sol = vrpp::solve_heuristic(inst, rng, heur);
  }
  const auto violations = vrpp::validate_solution(inst, sol);
  if (!violations.empty())
    throw std::runtime_error("solver produced an infeasible solution: " + violations.front().detail);
  const std::string body = vrpp::solution_to_json(inst, sol).dump(2) + "\n";
  if (!opts.out_path.empty()) {
    OutputTracker files;
    try {
      files.write(opts.out_path, body);
    } catch (...) {
      files.rollback();
      throw;
    }
  }
  out << "objective " << format_double(sol.objective) << "\n";
  if (opts.out_path.empty()) out << body;
  return kSuccess;
}

inline void add_run_options(CLI::App* cmd, RunOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON scenario configuration file");
  cmd->add_option("--preset", opts.preset_name, "built-in scenario: scenario1, scenario2 or scenario3");
  cmd->add_option("--seed", opts.seed, "single seed");
  cmd->add_option("--seeds", opts.seeds, "inclusive seed range A..B");
  cmd->add_option("--strategy", opts.strategies, "bucb, random, round_robin or oracle (repeatable)");
  cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--budget", opts.budget, "solver improvement iterations");
  cmd->add_option("--jobs", opts.jobs, "worker threads (0: one per hardware thread)")->capture_default_str();
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Hazard sensing and cleaning dispatch simulator"};
  app.require_subcommand(1);
  RunOptions run_spec, compare_spec;
  SolveOptions solve_spec;
  auto* run = app.add_subcommand("run", "simulate episodes and write per-episode trace and summary files");
  add_run_options(run, run_spec);
  auto* compare = app.add_subcommand("compare", "simulate several strategies and write an aggregate report");
  add_run_options(compare, compare_spec);
  auto* solve = app.add_subcommand("solve", "solve a routing instance file");
  solve->add_option("instance", solve_spec.instance_path, "instance JSON file")->required();
  solve->add_option("--out", solve_spec.out_path, "solution file (default: stdout)");
  solve->add_option("--seed", solve_spec.seed, "heuristic seed")->capture_default_str();
  solve->add_option("--budget", solve_spec.budget, "heuristic improvement iterations")->capture_default_str();
  solve->add_flag("--exact", solve_spec.exact, "use the exact solver (small instances only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*run) return cmd_run(run_spec, out);
    if (*compare) return cmd_compare(compare_spec, out);
    return cmd_solve(solve_spec, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace hazard::cli
