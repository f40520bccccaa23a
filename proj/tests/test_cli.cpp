#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "softclip/bounds.hpp"
#include "softclip/cli.hpp"
#include "softclip/csv.hpp"
#include "softclip/error.hpp"
#include "softclip/learner.hpp"
#include "softclip/mdp_io.hpp"

using namespace softclip;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto p = std::filesystem::temp_directory_path() / ("softclip_cli_" + name);
  std::ofstream(p) << contents;
  return p;
}

/// Value of `key` in the pac-budget table.
std::string table_value(const std::string& table, const std::string& key) {
  std::istringstream in(table);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k == key) {
      std::string rest;
      std::getline(ls, rest);
      return std::string(trim(rest));
    }
  }
  return "<missing>";
}

const std::string kOneStateMdp = "1 1 0.5\n0 0 1 1\n";

}  // namespace

TEST(Cli, HelpDocumentsDefaults) {
  for (const std::string cmd : {"solve", "train", "sweep", "pac-budget", "check-bounds"}) {
    const CliRun r = cli({cmd, "--help"});
    EXPECT_EQ(r.code, kExitOk) << cmd;
    EXPECT_NE(r.out.find("--gamma"), std::string::npos) << cmd;
    EXPECT_NE(r.out.find("0.98"), std::string::npos) << cmd;
    EXPECT_NE(r.out.find("--config"), std::string::npos) << cmd;
  }
  EXPECT_NE(cli({"train", "--help"}).out.find("--clip-mode"), std::string::npos);
}

TEST(Cli, MissingOrUnknownCommandIsUsageError) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"solve", "--no-such-flag", "1"}).code, kExitUsage);
}

TEST(Cli, SolveOneStateMdp) {
  const auto mdp = temp_file("one.mdp", kOneStateMdp);
  const CliRun r = cli({"solve", "--mdp", mdp.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  const QTable q = read_q_csv(in);
  EXPECT_NEAR(q(0, 0), 2.0, 1e-9);
  EXPECT_NE(r.err.find("gamma from"), std::string::npos);
  // Tight enough to reach the floating-point fixed point, which prints as 2.
  const CliRun exact = cli({"solve", "--mdp", mdp.string(), "--tol", "1e-16"});
  ASSERT_EQ(exact.code, kExitOk) << exact.err;
  EXPECT_EQ(exact.out, "state,action,q\n0,0,2\n");
}

TEST(Cli, SolveNonConvergenceExits3WithResidual) {
  const auto mdp = temp_file("one_tol.mdp", kOneStateMdp);
  const CliRun r = cli({"solve", "--mdp", mdp.string(), "--tol", "0"});
  EXPECT_EQ(r.code, kExitNumerical);
  EXPECT_NE(r.err.find("residual"), std::string::npos) << r.err;
}

TEST(Cli, SolveMazeIsReproducible) {
  const std::vector<std::string> args{"solve", "--maze-size", "7", "7", "--wall-prob", "0.2",
                                      "--gamma", "0.98", "--beta", "5", "--seed", "1"};
  const CliRun a = cli(args);
  const CliRun b = cli(args);
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "state,action,q");
  std::istringstream in(a.out);
  const QTable q = read_q_csv(in);
  EXPECT_EQ(q.n_actions(), 4u);
  for (double x : q.values()) {
    EXPECT_LE(x, 0.0);
    EXPECT_GE(x, -50.0);
  }
}

TEST(Cli, SolveRejectsBadInput) {
  EXPECT_EQ(cli({"solve", "--mdp", "/nonexistent/file.mdp"}).code, kExitUsage);
  const auto bad = temp_file("bad.mdp", "1 1 0.5\n0 0 1 0.5\n");
  EXPECT_EQ(cli({"solve", "--mdp", bad.string()}).code, kExitUsage);
}

TEST(Cli, TrainCurvesShareTheAggregatorFormat) {
  const std::vector<std::string> common{"--budget", "2000", "--eval-every", "500", "--seed", "3",
                                        "--maze-size", "5", "5"};
  std::vector<std::string> a{"train", "--clip-mode", "none"};
  std::vector<std::string> b{"train", "--clip-mode", "conditional-td", "--model", "given"};
  a.insert(a.end(), common.begin(), common.end());
  b.insert(b.end(), common.begin(), common.end());
  const CliRun ra = cli(a);
  const CliRun rb = cli(b);
  ASSERT_EQ(ra.code, kExitOk) << ra.err;
  ASSERT_EQ(rb.code, kExitOk) << rb.err;
  std::istringstream ia(ra.out), ib(rb.out);
  const LearningCurve ca = read_curve_csv(ia);
  const LearningCurve cb = read_curve_csv(ib);
  EXPECT_EQ(ca.env_steps, cb.env_steps);
  EXPECT_EQ(ca.env_steps.back(), 2000.0);
  EXPECT_NE(ra.err.find("auc="), std::string::npos);
  EXPECT_EQ(cli(a).out, ra.out);
}

TEST(Cli, TrainBaselineUsesRewardOverOneMinusGamma) {
  const CliRun r = cli({"train", "--clip-mode", "baseline", "--budget", "1000", "--eval-every", "500",
                     "--maze-size", "5", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  const LearningCurve c = read_curve_csv(in);
  for (std::size_t i = 0; i < c.env_steps.size(); ++i) {
    EXPECT_DOUBLE_EQ(c.lower_mean[i], -1.0 / (1.0 - 0.98));
    EXPECT_DOUBLE_EQ(c.upper_mean[i], -0.25 / (1.0 - 0.98));
  }
}

TEST(Cli, TrainUnknownClipModeIsUsageError) {
  const CliRun r = cli({"train", "--clip-mode", "sometimes"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, SweepWritesSummaryAndRejectsBadSpec) {
  const auto dir = std::filesystem::temp_directory_path() / "softclip_cli_sweep";
  std::filesystem::remove_all(dir);
  const CliRun ok = cli({"sweep", "--alphas", "0.2,0.4", "--mazes", "1", "--seeds", "2", "--maze-size", "3",
                      "3", "--budget", "1000", "--eval-every", "250", "--out-dir", dir.string()});
  ASSERT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_EQ(ok.out.substr(0, ok.out.find('\n')), "method,alpha,mean_auc,ci_low,ci_high,n_runs");
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "runs.csv"));
  std::filesystem::remove_all(dir);

  EXPECT_EQ(cli({"sweep", "--alphas", "0", "--out-dir", dir.string()}).code, kExitUsage);
  EXPECT_EQ(cli({"sweep", "--methods", "sometimes", "--out-dir", dir.string()}).code, kExitUsage);
  EXPECT_EQ(cli({"sweep"}).code, kExitUsage);  // --out-dir is required
}

TEST(Cli, PacBudgetHandValues) {
  const CliRun ns = cli({"pac-budget", "--eps", "1", "--delta", "0.1", "--gamma", "0.9", "--r-min", "0",
                      "--r-max", "1", "--beta", "1"});
  ASSERT_EQ(ns.code, kExitOk) << ns.err;
  EXPECT_EQ(table_value(ns.out, "n_states"), "150");

  const CliRun b = cli({"pac-budget", "--L-delta", "1", "--diam", "1", "--dim", "2", "--eps", "0.5", "--delta",
                     format_double(std::exp(-1.0))});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(table_value(b.out, "batch_size"), "4");

  const CliRun na = cli({"pac-budget", "--beta", "1", "--gamma", "0", "--r-min", "0", "--r-max", "1", "--eps",
                      "0.5", "--delta", format_double(2.0 / std::exp(1.0))});
  ASSERT_EQ(na.code, kExitOk) << na.err;
  EXPECT_EQ(table_value(na.out, "n_actions"), "4");

  const CliRun l = cli({"pac-budget", "--L-r", "1", "--L-p", "1", "--L-Q", "2", "--L-kappa", "0", "--gamma", "0.5"});
  ASSERT_EQ(l.code, kExitOk) << l.err;
  EXPECT_EQ(table_value(l.out, "L_delta"), "4");
  EXPECT_EQ(table_value(l.out, "confidence"), format_double(1.0 - 0.05 - 0.1 - 0.1));
}

TEST(Cli, PacBudgetErrors) {
  EXPECT_EQ(cli({"pac-budget", "--eps", "0"}).code, kExitUsage);
  EXPECT_EQ(cli({"pac-budget", "--eps", "1", "2"}).code, kExitUsage);
  EXPECT_EQ(cli({"pac-budget", "--delta", "1"}).code, kExitUsage);
  // eps at or above the return range makes the action branch inapplicable.
  const CliRun r = cli({"pac-budget", "--eps", "100", "--gamma", "0.5"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(table_value(r.out, "n_actions"), "n/a");
}

TEST(Cli, CheckBoundsRandomSolvedAndFile) {
  const CliRun random = cli({"check-bounds", "--q", "random", "--trials", "1000"});
  EXPECT_EQ(random.code, kExitOk) << random.err;
  EXPECT_NE(random.out.find("violations: 0/1000"), std::string::npos) << random.out;

  const CliRun rmdp = cli({"check-bounds", "--model", "random-mdp", "--terminal-fraction", "0.3", "--trials", "200",
                        "--q-low", "-5", "--q-high", "5"});
  EXPECT_EQ(rmdp.code, kExitOk) << rmdp.out;

  const auto exported = std::filesystem::temp_directory_path() / "softclip_cli_bounds.csv";
  const CliRun solved = cli({"check-bounds", "--q", "solved", "--export-bounds", exported.string()});
  EXPECT_EQ(solved.code, kExitOk) << solved.out;
  EXPECT_NE(solved.out.find("max(U-L): "), std::string::npos);
  EXPECT_NE(solved.out.find("tightness tolerance: "), std::string::npos);

  // Negative control: shift one upper bound below Q*.
  BoundPair b;
  {
    std::ifstream in(exported);
    b = read_bounds_csv(in);
  }
  b.upper(0, 0) = b.lower(0, 0) - 1.0;
  b.lower(0, 0) -= 2.0;
  {
    std::ofstream out(exported);
    write_bounds_csv(out, b);
  }
  const CliRun file = cli({"check-bounds", "--q", "file", "--q-file", exported.string()});
  EXPECT_EQ(file.code, kExitViolation);
  EXPECT_NE(file.out.find("violations: 1/"), std::string::npos) << file.out;
  std::filesystem::remove(exported);
}

TEST(Cli, ConfigFileFlagsOverride) {
  const auto cfg = temp_file("pac.cfg",
                             "# budgets\n"
                             "gamma = 0.9\n"
                             "--eps=1\n"
                             "delta = 0.1\n"
                             "\n"
                             "r-max = 1\n");
  const CliRun from_file = cli({"pac-budget", "--config", cfg.string()});
  ASSERT_EQ(from_file.code, kExitOk) << from_file.err;
  EXPECT_EQ(table_value(from_file.out, "n_states"), "150");
  EXPECT_NE(from_file.err.find("gamma=0.9"), std::string::npos) << from_file.err;

  const CliRun overridden = cli({"pac-budget", "--config", cfg.string(), "--gamma", "0.5"});
  ASSERT_EQ(overridden.code, kExitOk);
  EXPECT_EQ(table_value(overridden.out, "gamma"), "0.5");
  EXPECT_NE(overridden.err.find("gamma=0.5"), std::string::npos);

  const auto multi = temp_file("multi.cfg", "eps = 0.5 0.25 0.125\n");
  const CliRun m = cli({"pac-budget", "--config", multi.string()});
  ASSERT_EQ(m.code, kExitOk) << m.err;
  EXPECT_EQ(table_value(m.out, "eps"), "0.5 0.25 0.125");

  const auto broken = temp_file("broken.cfg", "gamma 0.9\n");
  EXPECT_EQ(cli({"pac-budget", "--config", broken.string()}).code, kExitUsage);
  EXPECT_EQ(cli({"pac-budget", "--config", "/nonexistent.cfg"}).code, kExitUsage);
}

TEST(Cli, ResolvedConfigIsLogged) {
  const CliRun r = cli({"pac-budget"});
  ASSERT_EQ(r.code, kExitOk);
  for (const char* key : {"eps=0.5", "delta=0.05", "gamma=0.98", "beta=5", "diam=1"}) {
    EXPECT_NE(r.err.find(key), std::string::npos) << key << "\n" << r.err;
  }
}

TEST(ExpandConfig, InsertsAfterCommandAndSkipsGivenKeys) {
  const auto cfg = temp_file("expand.cfg", "gamma = 0.5\nbeta = 2\n");
  const auto args = expand_config({"solve", "--config", cfg.string(), "--beta", "7"});
  EXPECT_EQ(args, (std::vector<std::string>{"solve", "--gamma=0.5", "--beta", "7"}));
  EXPECT_THROW(expand_config({"solve", "--config"}), InvalidArgument);
}
