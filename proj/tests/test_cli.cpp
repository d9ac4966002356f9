#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hazard/cli.hpp"

using namespace hazard;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "hazard");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("hazard_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::permissions(path_, fs::perms::owner_all, fs::perm_options::add, ec);
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  std::string str(const std::string& sub = "") const { return sub.empty() ? path_.string() : (path_ / sub).string(); }

 private:
  fs::path path_;
};

std::size_t count_files(const fs::path& dir, const std::string& suffix) {
  std::size_t n = 0;
  if (!fs::exists(dir)) return 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().string().ends_with(suffix)) ++n;
  return n;
}

}  // namespace

TEST(SeedRange, Parsing) {
  const auto r = cli::parse_seed_range("0..99");
  EXPECT_EQ(r.first, 0u);
  EXPECT_EQ(r.last, 99u);
  EXPECT_EQ(r.size(), 100u);
  EXPECT_EQ(cli::parse_seed_range("7").size(), 1u);
  EXPECT_THROW(cli::parse_seed_range("5..2"), cli::UsageError);
  EXPECT_THROW(cli::parse_seed_range("a..b"), cli::UsageError);
  EXPECT_THROW(cli::parse_seed_range("-1..3"), cli::UsageError);
}

TEST(CliRun, WritesTraceAndSummaryDeterministically) {
  TempDir a, b;
  const auto ra = run({"run", "--preset", "scenario1", "--seed", "7", "--strategy", "bucb", "--out", a.str()});
  const auto rb = run({"run", "--preset", "scenario1", "--seed", "7", "--strategy", "bucb", "--out", b.str()});
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(rb.code, 0) << rb.err;
  EXPECT_EQ(count_files(a.path(), ""), 2u);
  EXPECT_EQ(slurp(a.path() / "bucb_seed7_trace.csv"), slurp(b.path() / "bucb_seed7_trace.csv"));
  EXPECT_EQ(slurp(a.path() / "bucb_seed7_summary.json"), slurp(b.path() / "bucb_seed7_summary.json"));
  EXPECT_EQ(slurp(a.path() / "bucb_seed7_trace.csv").rfind(kTraceHeader, 0), 0u);
}

TEST(CliRun, JobCountDoesNotChangeOutput) {
  TempDir a, b;
  ASSERT_EQ(run({"run", "--preset", "scenario1", "--seeds", "0..3", "--strategy", "random", "--jobs", "1", "--out",
                 a.str()}).code,
            0);
  ASSERT_EQ(run({"run", "--preset", "scenario1", "--seeds", "0..3", "--strategy", "random", "--jobs", "3", "--out",
                 b.str()}).code,
            0);
  for (int s = 0; s < 4; ++s) {
    const std::string f = "random_seed" + std::to_string(s) + "_summary.json";
    EXPECT_EQ(slurp(a.path() / f), slurp(b.path() / f));
  }
}

TEST(CliRun, SummaryCardinality) {
  TempDir d;
  const auto r = run({"run", "--preset", "scenario1", "--seeds", "0..9", "--strategy", "bucb", "--strategy", "random",
                      "--strategy", "round_robin", "--strategy", "oracle", "--budget", "10", "--out", d.str()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_files(d.path(), "_summary.json"), 40u);
  EXPECT_EQ(count_files(d.path(), "_trace.csv"), 40u);
}

TEST(CliRun, UnwritableOutputLeavesNoFiles) {
  TempDir d;
  fs::create_directories(d.path());
  fs::permissions(d.path(), fs::perms::owner_read | fs::perms::owner_exec);
  const auto r = run({"run", "--preset", "scenario1", "--seed", "1", "--out", d.str()});
  fs::permissions(d.path(), fs::perms::owner_all, fs::perm_options::add);
  if (::geteuid() == 0) {
    // Root ignores directory permissions; use a path under a regular file instead.
    fs::remove_all(d.path());
    { std::ofstream(d.path()) << "x"; }
    const auto r2 = run({"run", "--preset", "scenario1", "--seed", "1", "--out", d.str("sub")});
    EXPECT_EQ(r2.code, cli::kRuntime) << r2.err;
    fs::remove(d.path());
    return;
  }
  EXPECT_EQ(r.code, cli::kRuntime);
  EXPECT_EQ(count_files(d.path(), ""), 0u);
}

TEST(CliRun, ExitCodes) {
  TempDir d;
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"fly"}).code, cli::kUsage);
  EXPECT_EQ(run({"run", "--seed", "1", "--out", d.str()}).code, cli::kUsage);
  EXPECT_EQ(run({"run", "--preset", "scenario1", "--config", "x.json", "--out", d.str()}).code, cli::kUsage);
  EXPECT_EQ(run({"run", "--preset", "scenario1", "--strategy", "greedy", "--out", d.str()}).code, cli::kUsage);
  EXPECT_EQ(run({"run", "--preset", "scenario1", "--seed", "1", "--seeds", "0..2", "--out", d.str()}).code,
            cli::kUsage);
  EXPECT_EQ(run({"run", "--preset", "scenario9", "--out", d.str()}).code, cli::kConfig);
  EXPECT_EQ(run({"run", "--config", "/nonexistent.json", "--out", d.str()}).code, cli::kConfig);
  EXPECT_EQ(run({"run", "--preset", "scenario1", "--budget", "0", "--out", d.str()}).code, cli::kConfig);
  EXPECT_EQ(run({"--help"}).code, cli::kSuccess);
  EXPECT_FALSE(fs::exists(d.path()));
}

TEST(CliRun, ConfigFileErrorsNameTheKey) {
  TempDir d;
  fs::create_directories(d.path());
  { std::ofstream(d.path() / "bad.json") << R"({"belief": {"decay": -1}})"; }
  const auto r = run({"run", "--config", d.str("bad.json"), "--out", d.str("o")});
  EXPECT_EQ(r.code, cli::kConfig);
  EXPECT_NE(r.err.find("decay"), std::string::npos);
  { std::ofstream(d.path() / "ok.json") << R"({"num_sites": 6, "seed": 3})"; }
  const auto ok = run({"run", "--config", d.str("ok.json"), "--out", d.str("o")});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_TRUE(fs::exists(d.path() / "o" / "bucb_seed3_summary.json"));
}

TEST(CliCompare, ReportAndUsage) {
  TempDir d;
  const auto one = run({"compare", "--preset", "scenario1", "--seeds", "0..1", "--strategy", "bucb", "--out", d.str()});
  EXPECT_EQ(one.code, cli::kUsage);
  const auto r = run({"compare", "--preset", "scenario1", "--seeds", "0..4", "--budget", "10", "--out", d.str()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = load_report(d.str("report.json"));
  EXPECT_EQ(rep.strategies.size(), 4u);
  EXPECT_EQ(rep.rows.size(), 20u);
  EXPECT_TRUE(rep.bucb_reduction_pct.count("random"));
  EXPECT_NE(r.out.find("bucb"), std::string::npos);
}

TEST(CliCompare, DuplicateStrategyEntriesMatch) {
  TempDir d;
  const auto r = run({"compare", "--preset", "scenario1", "--seeds", "0..2", "--strategy", "bucb", "--strategy",
                      "bucb", "--budget", "10", "--out", d.str()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = load_report(d.str("report.json"));
  ASSERT_EQ(rep.aggregates.size(), 2u);
  EXPECT_EQ(rep.aggregates[0].stats, rep.aggregates[1].stats);
}

TEST(CliSolve, HandExampleAndDeterminism) {
  TempDir d;
  fs::create_directories(d.path());
  {
    std::ofstream(d.path() / "two.json") << R"({"mode": "sensing", "travel_cost": 1,
      "vehicles": [{"max_distance": 0.5, "capacity": null}],
      "nodes": [{"x": 0, "y": 0.1, "value": 10}, {"x": 0, "y": 0.4, "value": 1}]})";
  }
  const auto exact = run({"solve", d.str("two.json"), "--exact"});
  ASSERT_EQ(exact.code, 0) << exact.err;
  EXPECT_EQ(exact.out.rfind("objective 9.8", 0), 0u) << exact.out;
  const auto h1 = run({"solve", d.str("two.json"), "--seed", "4", "--out", d.str("s1.json")});
  const auto h2 = run({"solve", d.str("two.json"), "--seed", "4", "--out", d.str("s2.json")});
  ASSERT_EQ(h1.code, 0) << h1.err;
  EXPECT_EQ(slurp(d.path() / "s1.json"), slurp(d.path() / "s2.json"));
  const auto sol = json::parse(slurp(d.path() / "s1.json"));
  EXPECT_TRUE(sol["feasible"].get<bool>());
  EXPECT_NEAR(sol["objective"].get<double>(), 9.8, 1e-12);
}

TEST(CliSolve, ExactSizeGuardAndMalformedInput) {
  TempDir d;
  fs::create_directories(d.path());
  {
    json nodes = json::array();
    for (int i = 0; i < 20; ++i) nodes.push_back({{"x", 0.01 * i}, {"y", 0.0}, {"value", 1.0}});
    std::ofstream(d.path() / "big.json") << json{{"mode", "sensing"}, {"vehicles", {{{"max_distance", 1.5}}}},
                                                 {"nodes", nodes}}
                                                .dump();
    std::ofstream(d.path() / "bad.json") << "{";
  }
  const auto big = run({"solve", d.str("big.json"), "--exact", "--out", d.str("o.json")});
  EXPECT_EQ(big.code, cli::kRuntime);
  EXPECT_NE(big.err.find("exceeds"), std::string::npos);
  EXPECT_FALSE(fs::exists(d.path() / "o.json"));
  EXPECT_EQ(run({"solve", d.str("bad.json")}).code, cli::kRuntime);
  EXPECT_EQ(run({"solve"}).code, cli::kUsage);
  EXPECT_EQ(run({"solve", d.str("big.json")}).code, 0);
}
