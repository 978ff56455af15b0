#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spkit/runner.hpp"

using namespace spkit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "spkit_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ScenarioConfig config_from(const std::string& text) {
  return interpret_config(ConfigTable::parse_string(text));
}

const std::string kQuickSaturated =
    "scenario = example1_saturated\n"
    "seed = 0\n"
    "[check]\n"
    "conditions = true\n"
    "sample_count = 500\n"
    "[sim]\n"
    "method = rk4\n"
    "dt = 1e-3\n"
    "t_final = 50\n"
    "record_every = 100\n"
    "[initial]\n"
    "x = 1.0\n"
    "z = 1.0\n"
    "[run]\n"
    "expect_converge = false\n";

}  // namespace

TEST(Runner, SaturatedRunWritesArtifactsAndPasses) {
  const auto dir = fresh_dir("sat_run");
  RunnerOptions opt;
  opt.out_dir = dir.string();
  opt.quiet = true;
  std::ostringstream console;
  const int status = run_scenario(config_from(kQuickSaturated), opt, console);
  EXPECT_EQ(status, 0);
  EXPECT_TRUE(fs::exists(dir / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(dir / "report.kv"));
  EXPECT_TRUE(fs::exists(dir / "report.txt"));
  EXPECT_TRUE(fs::exists(dir / "manifest.cfg"));
  const std::string kv = slurp(dir / "report.kv");
  EXPECT_NE(kv.find("check.conditions.pass: true"), std::string::npos);
  const std::string csv = slurp(dir / "trajectory.csv");
  EXPECT_EQ(csv.rfind("t,x_1,z_1,V_s,V_f,V\n", 0), 0u);
}

TEST(Runner, IdenticalConfigAndSeedGiveByteIdenticalCsv) {
  const auto dir1 = fresh_dir("det_a");
  const auto dir2 = fresh_dir("det_b");
  std::ostringstream console;
  RunnerOptions opt1;
  opt1.out_dir = dir1.string();
  opt1.quiet = true;
  RunnerOptions opt2;
  opt2.out_dir = dir2.string();
  opt2.quiet = true;
  EXPECT_EQ(run_scenario(config_from(kQuickSaturated), opt1, console), 0);
  EXPECT_EQ(run_scenario(config_from(kQuickSaturated), opt2, console), 0);
  EXPECT_EQ(slurp(dir1 / "trajectory.csv"), slurp(dir2 / "trajectory.csv"));
  EXPECT_EQ(slurp(dir1 / "report.kv"), slurp(dir2 / "report.kv"));
}

TEST(Runner, ManifestRoundTripReproducesResults) {
  const auto dir1 = fresh_dir("manifest_a");
  std::ostringstream console;
  RunnerOptions opt1;
  opt1.out_dir = dir1.string();
  opt1.quiet = true;
  opt1.seed_override = 42;  // overrides must be echoed into the manifest
  EXPECT_EQ(run_scenario(config_from(kQuickSaturated), opt1, console), 0);

  const auto dir2 = fresh_dir("manifest_b");
  RunnerOptions opt2;
  opt2.out_dir = dir2.string();
  opt2.quiet = true;
  const auto echoed =
      interpret_config(ConfigTable::parse_file((dir1 / "manifest.cfg").string()));
  EXPECT_EQ(echoed.seed, 42u);
  EXPECT_EQ(run_scenario(echoed, opt2, console), 0);
  EXPECT_EQ(slurp(dir1 / "trajectory.csv"), slurp(dir2 / "trajectory.csv"));
}

TEST(Runner, CheckFailureGivesStatusOneWithWitness) {
  // Over-claimed decrease rate: the certificate check fails and reports a
  // witness state.
  const std::string text =
      "scenario = example1_saturated\n"
      "[scenario]\n"
      "alpha_s_scale = 2.0\n"
      "[check]\n"
      "certificate = true\n"
      "sample_count = 10000\n"
      "[run]\n"
      "enabled = false\n";
  std::ostringstream console;
  const int status = run_scenario(config_from(text),RunnerOptions{}, console);
  EXPECT_EQ(status, 1);
  EXPECT_NE(console.str().find("slow_decrease.witness"), std::string::npos);
}

TEST(Runner, UnexpectedNonConvergenceGivesStatusThree) {
  // Constant-gain loop over a short horizon misses the 1e-3 target ball.
  const std::string text =
      "scenario = example2_feedback_opt\n"
      "[scenario]\n"
      "gain = constant\n"
      "coeff = 0.004\n"
      "[sim]\n"
      "method = rk45\n"
      "t_final = 2000\n"
      "record_every = 100\n"
      "[initial]\n"
      "x = 0.5\n"
      "z = 1.5\n"
      "[run]\n"
      "expect_converge = true\n"
      "target_tol = 1e-3\n";
  std::ostringstream console;
  const int status = run_scenario(config_from(text), RunnerOptions{}, console);
  EXPECT_EQ(status, 3);
}

TEST(Runner, DimensionMismatchIsConfigError) {
  const std::string text =
      "scenario = example1_saturated\n"
      "[initial]\n"
      "x = 1.0, 2.0\n"
      "z = 1.0\n";
  std::ostringstream console;
  EXPECT_THROW(run_scenario(config_from(text), RunnerOptions{}, console),
               ConfigError);
}

TEST(Runner, CheckOnlySkipsSimulationAndFiles) {
  const auto dir = fresh_dir("check_only");
  RunnerOptions opt;
  opt.quiet = true;
  opt.simulate_enabled = false;  // `check` subcommand behaviour
  std::ostringstream console;
  const int status = run_scenario(config_from(kQuickSaturated), opt, console);
  EXPECT_EQ(status, 0);
  EXPECT_TRUE(fs::is_empty(dir));
}

TEST(Runner, SourceSeekingShortRunEmitsAgentCsv) {
  const std::string text =
      "scenario = source_seeking\n"
      "[check]\n"
      "network = true\n"
      "[sim]\n"
      "method = rk4\n"
      "dt = 1e-3\n"
      "t_final = 150\n"
      "record_every = 1000\n"
      "[run]\n"
      "expect_converge = true\n";
  const auto dir = fresh_dir("seek_run");
  RunnerOptions opt;
  opt.out_dir = dir.string();
  opt.quiet = true;
  std::ostringstream console;
  const int status = run_scenario(config_from(text), opt, console);
  EXPECT_EQ(status, 0);
  const std::string agents = slurp(dir / "agents.csv");
  EXPECT_EQ(agents.rfind("t,p_1_1,p_1_2,", 0), 0u);
  EXPECT_NE(agents.find("q_4_2"), std::string::npos);
  const std::string kv = slurp(dir / "report.kv");
  EXPECT_NE(kv.find("run.stayed_in_ball_last_quarter: true"),
            std::string::npos);
}

TEST(Runner, CustomCurveChecks) {
  const std::string text =
      "scenario = custom\n"
      "[curves]\n"
      "gamma_s = linear(4)\n"
      "gamma_f = linear(0.2)\n"
      "[check]\n"
      "small_gain = true\n"
      "sigma = true\n";
  std::ostringstream console;
  const int status = run_scenario(config_from(text), RunnerOptions{}, console);
  EXPECT_EQ(status, 0);
  EXPECT_NE(console.str().find("check.small_gain.pass"), std::string::npos);
}

TEST(Runner, CustomMissingCurveIsConfigError) {
  const std::string text =
      "scenario = custom\n"
      "[check]\n"
      "small_gain = true\n";
  std::ostringstream console;
  try {
    run_scenario(config_from(text), RunnerOptions{}, console);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field_name, "curves.gamma_s");
  }
}
