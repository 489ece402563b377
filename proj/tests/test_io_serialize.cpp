#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "mutualsec/error.hpp"
#include "mutualsec/io.hpp"
#include "mutualsec/serialize.hpp"
#include "mutualsec/strategy.hpp"

using namespace mutualsec;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& body) {
  const fs::path p = fs::temp_directory_path() / ("mutualsec_" + name);
  std::ofstream(p) << body;
  return p;
}

const Environment kEnv{0.3, 0.05, 0.3, 0.2};

}  // namespace

TEST(Io, FormatAndParseDoubles) {
  for (double x : {0.1, 1.0 / 3.0, 5.330477527766034, 1e-300, -2.5e17}) EXPECT_EQ(io::parse_double(io::format_double(x)), x);
  EXPECT_EQ(io::format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(io::format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_THROW(io::parse_double("1.5x"), InvalidArgument);
  EXPECT_THROW(io::parse_double(""), InvalidArgument);
}

TEST(Io, SplitCsvTrimsFields) {
  EXPECT_EQ(io::split_csv_line("a, b ,c"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(io::split_csv_line("1,,2"), (std::vector<std::string>{"1", "", "2"}));
}

TEST(Io, MatrixRoundTrip) {
  TrafficMatrix tm(3);
  tm.set(0, 1, 0.1);
  tm.set(2, 0, 1.0 / 3.0);
  std::ostringstream os;
  io::write_matrix_csv(os, tm);
  const auto p = temp_file("matrix.csv", os.str());
  EXPECT_EQ(io::read_matrix_csv(p), tm);
}

TEST(Io, MatrixErrors) {
  EXPECT_THROW(io::read_matrix_csv(temp_file("bad1.csv", "0,1\n1\n")), InvalidArgument);
  EXPECT_THROW(io::read_matrix_csv(temp_file("bad2.csv", "0,-1\n1,0\n")), InvalidArgument);
  EXPECT_THROW(io::read_matrix_csv("/nonexistent/matrix.csv"), InvalidArgument);
}

TEST(Io, EdgeListWithHeaderAndDirectedFlag) {
  const auto p = temp_file("edges.csv", "# comment\ni,j,rate,directed\n1,2,2,0\n2,3,1.5,1\n");
  const auto tm = io::read_edge_csv(p);
  ASSERT_EQ(tm.size(), 3u);
  EXPECT_EQ(tm(0, 1), 2.0);
  EXPECT_EQ(tm(1, 0), 2.0);
  EXPECT_EQ(tm(1, 2), 1.5);
  EXPECT_EQ(tm(2, 1), 0.0);
  EXPECT_EQ(io::read_edge_csv(p, 5).size(), 5u);
  EXPECT_THROW(io::read_edge_csv(temp_file("edges0.csv", "0,1,1\n")), InvalidArgument);
}

TEST(Io, TimeSeriesCsv) {
  std::ostringstream os;
  io::write_time_series_csv(os, {SeriesRow{0, 1.5, false, 1.0}, SeriesRow{1, 2.25, true, 0.5}});
  EXPECT_EQ(os.str(), "period,total_cost,trigger_fired,mean_rating\n0,1.5,0,1\n1,2.25,1,0.5\n");
}

TEST(Serialize, DesignResultRoundTrip) {
  const auto r = optimal_design(kEnv, MonitoringModel::rational(0.1), complete_graph(5, 1.0), Subset(5, {0, 2, 3}));
  const auto j = json::to_json(r);
  EXPECT_EQ(j["subset"], nlohmann::json::parse("[1,3,4]"));
  const auto back = json::design_result_from_json(nlohmann::json::parse(j.dump()), 5);
  EXPECT_EQ(back.feasible, r.feasible);
  EXPECT_EQ(back.subset, r.subset);
  EXPECT_EQ(back.binding_as, r.binding_as);
  EXPECT_EQ(back.T_star, r.T_star);
  EXPECT_EQ(back.p0_star, r.p0_star);
  EXPECT_EQ(back.J_star, r.J_star);
  EXPECT_EQ(back.g_star, r.g_star);
}

TEST(Serialize, SimReportRoundTrip) {
  const auto tm = complete_graph(4, 1.0);
  const auto d = optimal_design(kEnv, MonitoringModel::rational(0.1), tm, Subset::all(4)).design();
  const auto r = simulate(d, BehaviorProfile::uniform(4, Behavior::grim_trigger), kEnv, MonitoringModel::rational(0.1),
                          tm, SimOptions{200, 5, true});
  EXPECT_TRUE(json::sim_report_from_json(nlohmann::json::parse(json::to_json(r).dump())) == r);
}

TEST(Serialize, IdResultRoundTrip) {
  using topology::Edge;
  const auto tm = from_edges(6, {Edge{0, 1, 2}, Edge{1, 2, 1}, Edge{1, 3, 2}, Edge{2, 3, 6}, Edge{2, 4, 8},
                                 Edge{3, 4, 5}, Edge{3, 5, 12}, Edge{4, 5, 9}});
  const auto r = iterative_deletion(Environment{0.3, 0.05, 0.2, 0.05}, MonitoringModel::rational(2.0), tm);
  const auto back = json::strategy_result_from_json(nlohmann::json::parse(json::to_json(r).dump()), 6);
  EXPECT_EQ(back.subset, r.subset);
  EXPECT_EQ(back.J, r.J);
  ASSERT_TRUE(back.trace);
  EXPECT_EQ(back.trace->chosen, r.trace->chosen);
  ASSERT_EQ(back.trace->iterations.size(), r.trace->iterations.size());
  for (std::size_t k = 0; k < r.trace->iterations.size(); ++k) {
    const auto &a = back.trace->iterations[k], &b = r.trace->iterations[k];
    EXPECT_EQ(a.subset, b.subset);
    EXPECT_EQ(a.critical_traffic, b.critical_traffic);
    EXPECT_EQ(a.critical, b.critical);
    EXPECT_EQ(a.evaluated, b.evaluated);
    EXPECT_EQ(a.skip_reason, b.skip_reason);
    if (b.design) EXPECT_EQ(a.design->J_star, b.design->J_star);
  }
}

TEST(Serialize, ThresholdRoundTrip) {
  const auto r = core_periphery_threshold(kEnv, MonitoringModel::rational(0.4), 1, 4.0, 14);
  const auto back = json::threshold_result_from_json(nlohmann::json::parse(json::to_json(r).dump()));
  EXPECT_EQ(back.K_star, r.K_star);
  EXPECT_EQ(back.regime, r.regime);
  ASSERT_EQ(back.rows.size(), r.rows.size());
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    EXPECT_EQ(back.rows[k].J_full, r.rows[k].J_full);
    EXPECT_EQ(back.rows[k].J_core, r.rows[k].J_core);
    EXPECT_EQ(back.rows[k].difference, r.rows[k].difference);
    EXPECT_EQ(back.rows[k].closed_form, r.rows[k].closed_form);
  }
}
