#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mutualsec/design.hpp"
#include "mutualsec/error.hpp"
#include "mutualsec/strategy.hpp"
#include "oracles.hpp"

using namespace mutualsec;

namespace {

const Environment kEnv{0.3, 0.05, 0.3, 0.2};

TrafficMatrix six_as_graph() {
  using topology::Edge;
  return from_edges(6, {Edge{0, 1, 2}, Edge{1, 2, 1}, Edge{1, 3, 2}, Edge{2, 3, 6}, Edge{2, 4, 8}, Edge{3, 4, 5},
                        Edge{3, 5, 12}, Edge{4, 5, 9}});
}

// Exhaustive minimum written against optimal_design only, with the empty
// deployment costing p_high times the total traffic.
double enumerate_best(const Environment& env, const MonitoringModel& mon, const TrafficMatrix& tm) {
  const std::size_t n = tm.size();
  double best = env.p_high * tm.total();
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << n); ++m) {
    const auto r = optimal_design(env, mon, tm, Subset::from_mask(n, m));
    if (r.feasible) best = std::min(best, r.J_star);
  }
  return best;
}

}  // namespace

TEST(IterativeDeletion, Table3Trace) {
  const Environment env{0.3, 0.05, 0.2, 0.05};
  const auto r = iterative_deletion(env, MonitoringModel::rational(2.0), six_as_graph());
  ASSERT_TRUE(r.trace);
  const auto& it = r.trace->iterations;
  ASSERT_EQ(it.size(), 5u);
  const std::vector<double> crit{2, 3, 14, 14, 12};
  const std::vector<std::vector<AsIndex>> deleted{{0}, {1}, {2}, {4}, {3, 5}};
  const std::vector<bool> evaluated{true, true, true, false, false};
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(it[k].critical_traffic, crit[k]) << k;
    EXPECT_EQ(it[k].critical, deleted[k]) << k;
    EXPECT_EQ(it[k].evaluated, evaluated[k]) << k;
    EXPECT_EQ(it[k].evaluated, it[k].design.has_value());
    EXPECT_EQ(it[k].evaluated, it[k].skip_reason.empty());
  }
  EXPECT_EQ(r.subset, Subset(6, {2, 3, 4, 5}));
  EXPECT_EQ(*r.trace->chosen, 2u);
  EXPECT_LT(it[2].design->J_star, it[1].design->J_star);
  EXPECT_LT(it[1].design->J_star, it[0].design->J_star);
  EXPECT_EQ(r.evaluations, 3u);
}

TEST(IterativeDeletion, SkippedIterationsCostMore) {
  const Environment env{0.3, 0.05, 0.2, 0.05};
  const auto mon = MonitoringModel::rational(2.0);
  const auto tm = six_as_graph();
  const auto r = iterative_deletion(env, mon, tm);
  for (const auto& it : r.trace->iterations) {
    if (it.evaluated) continue;
    const auto forced = optimal_design(env, mon, tm, it.subset);
    if (forced.feasible) EXPECT_GT(forced.J_star, r.J);
  }
}

TEST(IterativeDeletion, CompleteGraphSingleEvaluation) {
  const auto r = iterative_deletion(kEnv, MonitoringModel::rational(0.1), complete_graph(8, 1.0));
  ASSERT_EQ(r.trace->iterations.size(), 1u);
  EXPECT_EQ(r.trace->iterations[0].critical.size(), 8u);
  EXPECT_TRUE(r.subset.is_full());
  EXPECT_EQ(r.evaluations, 1u);
}

TEST(IterativeDeletion, Example2EvaluationPath) {
  using topology::Edge;
  const auto tm = from_edges(4, {Edge{0, 1, 1}, Edge{0, 3, 1}, Edge{1, 2, 3}, Edge{2, 3, 3}});
  const Environment env{0.3, 0.05, 0.3, 0.05};
  const auto mon = MonitoringModel::rational(0.01);
  const auto r = iterative_deletion(env, mon, tm);
  const auto& it = r.trace->iterations;
  ASSERT_GE(it.size(), 2u);
  EXPECT_TRUE(it[0].evaluated);
  EXPECT_EQ(it[0].critical_traffic, 2.0);
  EXPECT_TRUE(it[1].evaluated);
  EXPECT_EQ(it[1].subset, Subset(4, {1, 2, 3}));
  EXPECT_EQ(it[1].critical_traffic, 3.0);
  const double j_full = optimal_design(env, mon, tm, Subset::all(4)).J_star;
  const double j_sub = optimal_design(env, mon, tm, Subset(4, {1, 2, 3})).J_star;
  EXPECT_DOUBLE_EQ(r.J, std::min(j_full, j_sub));
}

TEST(IterativeDeletion, InfeasibleEverywhereThrows) {
  EXPECT_THROW(iterative_deletion(kEnv, MonitoringModel::rational(0.1), complete_graph(4, 0.2)), Infeasible);
}

TEST(IterativeDeletion, WarnsWhenAssumptionsFail) {
  // A pendant AS on rate 1 cannot recoup c = 0.3 at a quality gap of 0.25.
  TrafficMatrix tm = complete_graph(5, 2.0);
  for (AsIndex i = 1; i < 5; ++i) tm.set_symmetric(0, i, 0.0);
  tm.set_symmetric(0, 1, 1.0);
  const auto r = iterative_deletion(kEnv, MonitoringModel::rational(0.1), tm);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_EQ(r.subset, Subset(5, {1, 2, 3, 4}));
}

TEST(IterativeDeletion, AtMostNIterations) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 30; ++rep) {
    const auto tm = oracle::random_symmetric(8, 0.4, 8, rng);
    try {
      const auto r = iterative_deletion(kEnv, MonitoringModel::rational(0.2), tm);
      EXPECT_LE(r.trace->iterations.size(), 8u);
      for (std::size_t k = 1; k < r.trace->iterations.size(); ++k)
        EXPECT_LT(r.trace->iterations[k].subset.size(), r.trace->iterations[k - 1].subset.size());
    } catch (const Infeasible&) {
    }
  }
}

TEST(BruteForce, MatchesEnumeration) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 15; ++rep) {
    const auto tm = oracle::random_symmetric(6, 0.5, 6, rng);
    const auto mon = MonitoringModel::rational(0.1 + 0.1 * (rep % 3));
    const auto r = brute_force_optimal(kEnv, mon, tm);
    EXPECT_DOUBLE_EQ(r.J, enumerate_best(kEnv, mon, tm)) << rep;
    EXPECT_EQ(r.evaluations, 63u);
  }
}

TEST(BruteForce, TwoNodes) {
  TrafficMatrix tm(2);
  tm.set_symmetric(0, 1, 4.0);
  const auto r = brute_force_optimal(kEnv, MonitoringModel::rational(0.1), tm);
  EXPECT_TRUE(r.subset.is_full());
}

TEST(BruteForce, EmptyDeploymentWhenNothingIsFeasible) {
  const auto tm = complete_graph(4, 0.2);
  const auto r = brute_force_optimal(kEnv, MonitoringModel::rational(0.1), tm);
  EXPECT_TRUE(r.subset.empty());
  EXPECT_FALSE(r.design.has_value());
  EXPECT_DOUBLE_EQ(r.J, 0.3 * tm.total());
}

TEST(BruteForce, RejectsOverCap) {
  EXPECT_THROW(brute_force_optimal(kEnv, MonitoringModel::rational(0.1), complete_graph(6, 1.0), 5),
               InvalidArgument);
}

TEST(BruteForce, FullDeploymentOnMctTopologies) {
  const auto mon = MonitoringModel::rational(0.1);
  const Environment env{0.3, 0.05, 0.3, 0.2};
  for (std::size_t n = 3; n <= 8; ++n) {
    std::vector<TrafficMatrix> tms{complete_graph(n, 2.0), line_graph(n, 2.0), star_graph(n, 2.0)};
    if (n >= 5) tms.push_back(ring_lattice(n, 4, 1.0));
    for (const auto& tm : tms) {
      if (!validate_assumptions(env, mon, tm, Subset::all(n)).all_pass()) continue;
      EXPECT_TRUE(brute_force_optimal(env, mon, tm).subset.is_full()) << n;
    }
  }
}

TEST(Strategy, IterativeDeletionEqualsBruteForceUnderAssumptions) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int rep = 0; rep < 400 && checked < 40; ++rep) {
    const std::size_t n = 4 + rep % 4;
    const auto tm = oracle::random_symmetric(n, 0.5, 6, rng);
    const Environment env{0.3, 0.05, 0.1 + 0.2 * u(rng), 0.05 + 0.3 * u(rng)};
    const auto mon = MonitoringModel::rational(0.05 + 0.5 * u(rng));
    if (!validate_assumptions(env, mon, tm, Subset::all(n)).all_pass()) continue;
    StrategyResult id;
    try {
      id = iterative_deletion(env, mon, tm);
    } catch (const Infeasible&) {
      continue;
    }
    ++checked;
    const auto bf = brute_force_optimal(env, mon, tm);
    EXPECT_NEAR(id.J, bf.J, 1e-9 * bf.J) << rep;
  }
  EXPECT_GE(checked, 20);
}

TEST(Strategy, NestedSubsetsWithoutLargerCriticalTrafficCostMore) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> coin(0, 1);
  const auto mon = MonitoringModel::rational(0.1);
  int checked = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const auto tm = oracle::random_symmetric(7, 0.6, 6, rng);
    if (!validate_assumptions(kEnv, mon, tm, Subset::all(7)).all_pass()) continue;
    std::uint64_t big = 0, small = 0;
    for (std::size_t i = 0; i < 7; ++i)
      if (coin(rng) || i < 3) {
        big |= std::uint64_t{1} << i;
        if (coin(rng)) small |= std::uint64_t{1} << i;
      }
    if (small == 0 || small == big) continue;
    const Subset P = Subset::from_mask(7, big), Q = Subset::from_mask(7, small);
    if (critical_traffic(tm, Q).value > critical_traffic(tm, P).value) continue;
    const auto a = optimal_design(kEnv, mon, tm, P), b = optimal_design(kEnv, mon, tm, Q);
    if (!a.feasible || !b.feasible) continue;
    ++checked;
    EXPECT_GT(b.J_star, a.J_star) << rep;
  }
  EXPECT_GE(checked, 5);
}

TEST(MctShortcut, ReturnsFullSetWhenApplicable) {
  const auto mon = MonitoringModel::rational(0.1);
  const auto r = mct_shortcut(kEnv, mon, complete_graph(6, 1.0));
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(r->subset.is_full());
  EXPECT_FALSE(mct_shortcut(kEnv, mon, core_periphery(4, 1, 4.0)).has_value());
}

TEST(Threshold, ReferenceInstance) {
  const auto r = core_periphery_threshold(Environment{0.3, 0.05, 0.3, 0.2}, MonitoringModel::rational(0.4), 1, 4.0, 30);
  EXPECT_EQ(r.K_star, 11u);
  EXPECT_EQ(r.N_star, 22u);
  EXPECT_EQ(r.regime, "threshold");
  // Closed form with g = 0.4e/5: K - 1/(K-1) >= 0.7 / (g c).
  const double g = 0.4 * std::exp(1.0) / 5;
  std::size_t K_closed = 3;
  while (K_closed - 1.0 / (K_closed - 1.0) < 0.7 / (g * 0.3)) ++K_closed;
  EXPECT_EQ(K_closed, 11u);
  for (const auto& row : r.rows) EXPECT_EQ(row.N, 2 * row.K);
}

TEST(Threshold, CoreNeverBetterWhenPeripheryTrafficIsCheap) {
  const auto r = core_periphery_threshold(Environment{0.3, 0.05, 0.3, 0.2}, MonitoringModel::rational(0.4), 1, 1.0, 12);
  EXPECT_EQ(r.K_star, 0u);
  EXPECT_EQ(r.regime, "core_always");
}

TEST(Threshold, PerfectMonitoringNeverCrosses) {
  const auto r = core_periphery_threshold(Environment{0.3, 0.05, 0.3, 0.2}, MonitoringModel::perfect(), 1, 4.0, 30);
  EXPECT_EQ(r.K_star, 0u);
  for (const auto& row : r.rows) EXPECT_LT(row.difference, 0.0);
}
