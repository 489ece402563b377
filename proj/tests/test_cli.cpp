#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "mutualsec/error.hpp"
#include "mutualsec/exec.hpp"
#include "mutualsec/serialize.hpp"

using namespace mutualsec;
using Json = nlohmann::json;

namespace {

const std::string kConfigs = std::string(MUTUALSEC_SOURCE_DIR) + "/configs/";

struct Result {
  int code;
  std::string out, err;
  Json doc() const { return Json::parse(out); }
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mutualsec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, DesignOnReferenceConfig) {
  const auto r = run_cli({"design", "--config", kConfigs + "reference.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto d = r.doc();
  EXPECT_NEAR(d["design"]["J_star"].get<double>(), 5.33049, 2e-5);
  EXPECT_DOUBLE_EQ(d["J_first_best"].get<double>(), 5.2);
  EXPECT_TRUE(d["design"]["feasible"].get<bool>());
  EXPECT_TRUE(d["assumptions"]["all_pass"].get<bool>());
}

TEST(Cli, ConfigErrorNamesField) {
  const auto r = run_cli({"design", "--config", kConfigs + "reference.json", "--set", "environment.p_low=0.5"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("p_low"), std::string::npos);
}

TEST(Cli, UnknownKeysAndMissingFilesAreConfigErrors) {
  EXPECT_EQ(run_cli({"design", "--config", kConfigs + "reference.json", "--set", "environment.gamma=1"}).code, 1);
  EXPECT_EQ(run_cli({"design", "--config", kConfigs + "missing.json"}).code, 1);
  const auto r = run_cli({"id", "--config", kConfigs + "six_as_deletion.json", "--set", "topology.file=nowhere.csv"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("topology"), std::string::npos);
  EXPECT_EQ(run_cli({"design", "--format", "xml", "--config", kConfigs + "reference.json"}).code, 1);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 1);
}

TEST(Cli, InfeasibleExitCode) {
  const auto r = run_cli({"design", "--config", kConfigs + "reference.json", "--set", "topology.lambda0=0.1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.doc()["design"]["feasible"].get<bool>());
  EXPECT_NE(r.err.find("infeasible"), std::string::npos);
}

TEST(Cli, MctExamples) {
  EXPECT_TRUE(run_cli({"mct", "--config", kConfigs + "square_mct.json"}).doc()["report"]["holds"].get<bool>());
  const auto d = run_cli({"mct", "--config", kConfigs + "square_no_mct.json"}).doc();
  EXPECT_FALSE(d["report"]["holds"].get<bool>());
  EXPECT_EQ(d["report"]["witness"], Json::parse("[2,3,4]"));
}

TEST(Cli, IdOutputRoundTripsThroughLibrary) {
  const auto r = run_cli({"id", "--config", kConfigs + "six_as_deletion.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto parsed = mutualsec::json::strategy_result_from_json(r.doc()["result"], 6);
  EXPECT_EQ(parsed.subset, Subset(6, {2, 3, 4, 5}));
  std::vector<double> crit;
  for (const auto& it : parsed.trace->iterations) crit.push_back(it.critical_traffic);
  EXPECT_EQ(crit, (std::vector<double>{2, 3, 14, 14, 12}));

  const auto direct = iterative_deletion(Environment{0.3, 0.05, 0.2, 0.05}, MonitoringModel::rational(2.0),
                                         from_edges(6, {{0, 1, 2}, {1, 2, 1}, {1, 3, 2}, {2, 3, 6}, {2, 4, 8},
                                                        {3, 4, 5}, {3, 5, 12}, {4, 5, 9}}));
  EXPECT_EQ(parsed.J, direct.J);
}

TEST(Cli, IdCsvHasOneRowPerIteration) {
  const auto r = run_cli({"id", "--config", kConfigs + "six_as_deletion.json", "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  std::istringstream is(r.out);
  std::string line;
  int rows = -1;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 5);
  EXPECT_NE(r.out.find("does not exceed"), std::string::npos);
}

TEST(Cli, ThresholdCorePeriphery) {
  const auto d = run_cli({"threshold", "--config", kConfigs + "core_periphery.json"}).doc();
  EXPECT_EQ(d["result"]["N_star"].get<int>(), 22);
  EXPECT_EQ(d["result"]["K_star"].get<int>(), 11);
}

TEST(Cli, SweepTable2IsMonotone) {
  const auto d = run_cli({"sweep", "--config", kConfigs + "ring_lattice_sweep.json"}).doc();
  const auto& rows = d["rows"];
  ASSERT_EQ(rows.size(), 18u);
  auto cost = [&](int w, int k) { return rows[w * 6 + k]["normalized_cost"].get<double>(); };
  for (int w = 0; w < 3; ++w)
    for (int k = 0; k + 1 < 6; ++k) EXPECT_GT(cost(w, k), cost(w, k + 1));
  for (int k = 0; k < 6; ++k)
    for (int w = 0; w + 1 < 3; ++w) EXPECT_LT(cost(w, k), cost(w + 1, k));
}

TEST(Cli, SweepOrderIndependentOfThreads) {
  const auto a = run_cli({"sweep", "--config", kConfigs + "ring_lattice_sweep.json", "--format", "csv", "--threads", "1"});
  const auto b = run_cli({"sweep", "--config", kConfigs + "ring_lattice_sweep.json", "--format", "csv", "--threads", "4"});
  set_thread_count(0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, SweepReportsInvalidGridPoints) {
  const auto r = run_cli({"sweep", "--config", kConfigs + "ring_lattice_sweep.json", "--set", "sweep.axes.d=[5,13]"});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, SimulateProfileWritesSeries) {
  const auto series = std::filesystem::temp_directory_path() / "mutualsec_series.csv";
  const auto r = run_cli({"simulate", "--config", kConfigs + "reference.json", "--set", "simulate.horizon=50", "--set",
                          "simulate.seeds=1", "--set", "simulate.series=true", "--set",
                          "simulate.series_out=\"" + series.string() + "\"", "--seed", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = mutualsec::json::sim_report_from_json(r.doc()["runs"][0]);
  EXPECT_EQ(report.horizon, 50u);
  EXPECT_EQ(report.seed, 5u);
  EXPECT_EQ(report.time_series.size(), 50u);
  std::ifstream f(series);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "period,total_cost,trigger_fired,mean_rating");
}

TEST(Cli, SimulateDeviatorsAndBehaviors) {
  const auto base = kConfigs + "reference.json";
  const auto never = run_cli({"simulate", "--config", base, "--set", "simulate.horizon=100", "--set",
                              "simulate.seeds=1", "--set", "simulate.behavior=\"never_deploy\""});
  ASSERT_EQ(never.code, 0) << never.err;
  EXPECT_DOUBLE_EQ(never.doc()["mean_avg_cost"].get<double>(), 16.8);
  const auto bad = run_cli({"simulate", "--config", base, "--set", "simulate.behavior=\"lazy\""});
  EXPECT_EQ(bad.code, 1);
  const auto dev = run_cli({"simulate", "--config", base, "--set", "simulate.horizon=100", "--set", "simulate.seeds=1",
                            "--set", "simulate.deviators=[{\"as\": 2, \"behavior\": \"persistent_deviator\"}]"});
  EXPECT_EQ(dev.code, 0) << dev.err;
}

TEST(Cli, SimulateComparisonWarnsOnOneWayTraffic) {
  const auto r = run_cli({"simulate", "--config", kConfigs + "square_mct.json", "--set",
                          "topology.edges=[[1,2,2,1],[2,3,3],[3,4,3],[1,4,2]]", "--set", "simulate.mode=\"comparison\"",
                          "--set", "simulate.beta_grid=[0.1]", "--set", "simulate.horizon=50", "--set",
                          "simulate.seeds=2", "--set", "simulate.schemes=[\"tft\"]"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("one direction"), std::string::npos);
}

TEST(Cli, OutFlagWritesFile) {
  const auto path = std::filesystem::temp_directory_path() / "mutualsec_out.json";
  std::filesystem::remove(path);
  const auto r = run_cli({"bruteforce", "--config", kConfigs + "square_mct.json", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  const auto d = Json::parse(f);
  EXPECT_EQ(d["result"]["evaluations"].get<int>(), 15);
}

TEST(Cli, OverrideParsing) {
  Json doc = Json::object();
  cli::apply_override(doc, "a.b=3");
  cli::apply_override(doc, "a.c=hello");
  cli::apply_override(doc, "d=[1,2]");
  EXPECT_EQ(doc["a"]["b"].get<int>(), 3);
  EXPECT_EQ(doc["a"]["c"].get<std::string>(), "hello");
  EXPECT_EQ(doc["d"].size(), 2u);
  EXPECT_THROW(cli::apply_override(doc, "novalue"), mutualsec::ConfigError);
}
