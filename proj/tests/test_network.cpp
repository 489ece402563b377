#include <gtest/gtest.h>

#include <random>

#include "mutualsec/error.hpp"
#include "mutualsec/network.hpp"
#include "oracles.hpp"

using namespace mutualsec;

namespace {

TrafficMatrix six_as_graph() {
  using topology::Edge;
  return generate(topology::EdgeList{
      6, {Edge{0, 1, 2}, Edge{1, 2, 1}, Edge{1, 3, 2}, Edge{2, 3, 6}, Edge{2, 4, 8}, Edge{3, 4, 5}, Edge{3, 5, 12},
          Edge{4, 5, 9}}});
}

TrafficMatrix square(double a, double b) {
  using topology::Edge;
  return generate(topology::EdgeList{4, {Edge{0, 1, a}, Edge{0, 3, a}, Edge{1, 2, b}, Edge{2, 3, b}}});
}

Subset labels(std::size_t n, std::vector<AsIndex> one_based) {
  for (auto& i : one_based) --i;
  return Subset(n, one_based);
}

}  // namespace

TEST(TrafficMatrix, RejectsNegativeRatesAndSelfTraffic) {
  TrafficMatrix tm(3);
  EXPECT_THROW(tm.set(0, 1, -1.0), InvalidArgument);
  EXPECT_THROW(tm.set(1, 1, 1.0), InvalidArgument);
  EXPECT_THROW(TrafficMatrix(1), InvalidArgument);
  EXPECT_THROW(TrafficMatrix(2, {0, 1, 1}), InvalidArgument);
}

TEST(Subset, SortsAndRejectsDuplicates) {
  const Subset s(5, {3, 0, 2});
  EXPECT_EQ(s.members(), (std::vector<AsIndex>{0, 2, 3}));
  EXPECT_EQ(s.label(), "{1,3,4}");
  EXPECT_TRUE(s.contains(2));
  EXPECT_FALSE(s.contains(1));
  EXPECT_THROW(Subset(3, {0, 0}), InvalidArgument);
  EXPECT_THROW(Subset(3, {3}), InvalidArgument);
  EXPECT_EQ(Subset::from_mask(5, s.mask()), s);
}

TEST(Aggregates, CompleteGraph) {
  const auto agg = aggregates(complete_graph(3, 1.0));
  EXPECT_EQ(agg.outbound, (std::vector<double>{2, 2, 2}));
  EXPECT_EQ(agg.inbound, (std::vector<double>{2, 2, 2}));
}

TEST(Aggregates, Table3Graph) {
  EXPECT_EQ(aggregates(six_as_graph()).inbound, (std::vector<double>{2, 5, 15, 25, 22, 21}));
}

TEST(Aggregates, ZeroMatrix) {
  const auto agg = aggregates(TrafficMatrix(2));
  EXPECT_EQ(agg.outbound, (std::vector<double>{0, 0}));
  EXPECT_EQ(agg.inbound, (std::vector<double>{0, 0}));
}

TEST(Aggregates, ConservationOnRandomMatrices) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int rep = 0; rep < 50; ++rep) {
    TrafficMatrix tm(7);
    for (AsIndex i = 0; i < 7; ++i)
      for (AsIndex j = 0; j < 7; ++j)
        if (i != j) tm.set(i, j, std::floor(u(rng) * 4) / 4);
    const auto agg = aggregates(tm);
    double a = 0, b = 0;
    for (double x : agg.outbound) a += x;
    for (double x : agg.inbound) b += x;
    EXPECT_EQ(a, b);
  }
}

TEST(InboundWithin, SquareAndTable3) {
  EXPECT_EQ(inbound_within(square(2, 3), labels(4, {2, 3, 4}), 1), 3.0);
  EXPECT_EQ(inbound_within(six_as_graph(), labels(6, {2, 3, 4, 5, 6}), 1), 3.0);
  EXPECT_THROW(inbound_within(square(2, 3), labels(4, {2, 3}), 0), InvalidArgument);
}

TEST(InboundWithin, FullSetMatchesAggregates) {
  const auto tm = six_as_graph();
  const auto agg = aggregates(tm);
  for (AsIndex i = 0; i < 6; ++i) EXPECT_EQ(inbound_within(tm, Subset::all(6), i), agg.inbound[i]);
}

TEST(CriticalTraffic, Examples) {
  EXPECT_EQ(critical_traffic(square(2, 3), Subset::all(4)).value, 4.0);
  EXPECT_EQ(critical_traffic(square(1, 3), labels(4, {2, 3, 4})).value, 3.0);
  EXPECT_EQ(critical_traffic(square(1, 3), labels(4, {3})).value, 0.0);
  EXPECT_THROW(critical_traffic(square(1, 3), Subset::none(4)), InvalidArgument);
}

TEST(CriticalTraffic, Table3DeletionPath) {
  const auto tm = six_as_graph();
  Subset p = Subset::all(6);
  std::vector<double> trace;
  std::vector<std::vector<AsIndex>> deleted;
  while (!p.empty()) {
    const auto ct = critical_traffic(tm, p);
    trace.push_back(ct.value);
    deleted.push_back(ct.critical);
    p = p.without(ct.critical);
  }
  EXPECT_EQ(trace, (std::vector<double>{2, 3, 14, 14, 12}));
  EXPECT_EQ(deleted, (std::vector<std::vector<AsIndex>>{{0}, {1}, {2}, {4}, {3, 5}}));
}

TEST(CriticalTraffic, FullSetIsMinimumInbound) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    const auto tm = oracle::random_symmetric(8, 0.4, 9, rng);
    const auto agg = aggregates(tm);
    EXPECT_EQ(critical_traffic(tm, Subset::all(8)).value, *std::min_element(agg.inbound.begin(), agg.inbound.end()));
  }
}

TEST(Mct, TwoSquareExamples) {
  EXPECT_TRUE(has_mct(square(2, 3)).holds);
  const auto r = has_mct(square(1, 3));
  EXPECT_FALSE(r.holds);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(*r.witness, labels(4, {2, 3, 4}));
  EXPECT_EQ(r.witness_critical, 3.0);
}

TEST(Mct, RejectsTooLarge) { EXPECT_THROW(has_mct(complete_graph(6, 1.0), 5), InvalidArgument); }

TEST(Mct, AgreesWithOracleEnumeration) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 3 + rep % 6;
    const auto tm = oracle::random_symmetric(n, 0.5, 6, rng);
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    const double nu_full = oracle::critical(tm, full);
    bool holds = true;
    for (std::uint64_t m = 1; m < full; ++m)
      if (oracle::critical(tm, m) > nu_full) holds = false;
    EXPECT_EQ(has_mct(tm).holds, holds) << "rep " << rep;
  }
}

TEST(Mct, HoldsOnRegularLinesStarsAndTrees) {
  std::mt19937_64 rng(5);
  for (std::size_t n = 3; n <= 12; ++n) {
    EXPECT_TRUE(has_mct(complete_graph(n, 1.5)).holds) << n;
    EXPECT_TRUE(has_mct(line_graph(n, 2.0)).holds) << n;
    EXPECT_TRUE(has_mct(star_graph(n, 1.0)).holds) << n;
    for (std::size_t d = 2; d < n; d += 2) EXPECT_TRUE(has_mct(ring_lattice(n, d, 1.0)).holds) << n << " " << d;
    // Random tree: each node attaches to an earlier one.
    std::vector<topology::Edge> edges;
    for (AsIndex i = 1; i < n; ++i)
      edges.push_back(topology::Edge{std::uniform_int_distribution<AsIndex>(0, i - 1)(rng), i, 1.0});
    EXPECT_TRUE(has_mct(generate(topology::EdgeList{n, edges})).holds) << n;
  }
}

TEST(Mct, FailsOnCorePeriphery) {
  for (std::size_t K = 3; K <= 8; ++K) {
    const auto tm = core_periphery(K, 1, 1.0);
    EXPECT_EQ(critical_traffic(tm, Subset::all(2 * K)).value, 1.0);
    std::vector<AsIndex> core(K);
    for (AsIndex i = 0; i < K; ++i) core[i] = i;
    EXPECT_EQ(critical_traffic(tm, Subset(2 * K, core)).value, static_cast<double>(K - 1));
    if (2 * K <= 16) EXPECT_FALSE(has_mct(tm).holds) << K;
  }
}

TEST(Generate, CorePeripheryShape) {
  const auto tm = core_periphery(4, 1, 1.0);
  ASSERT_EQ(tm.size(), 8u);
  const auto agg = aggregates(tm);
  for (AsIndex i = 0; i < 4; ++i) EXPECT_EQ(agg.inbound[i], 4.0);
  for (AsIndex i = 4; i < 8; ++i) EXPECT_EQ(agg.inbound[i], 1.0);
  EXPECT_TRUE(tm.symmetric());
}

TEST(Generate, LineAndRing) {
  EXPECT_EQ(aggregates(line_graph(3, 1.0)).inbound, (std::vector<double>{1, 2, 1}));
  const auto ring = aggregates(ring_lattice(10, 4, 1.0)).inbound;
  for (double x : ring) EXPECT_EQ(x, 4.0);
  // Odd degree uses the antipodal chord and needs an even size.
  const auto odd = aggregates(ring_lattice(12, 5, 1.0)).inbound;
  for (double x : odd) EXPECT_EQ(x, 5.0);
}

TEST(Generate, RejectsInvalidParameters) {
  EXPECT_THROW(ring_lattice(11, 5, 1.0), InvalidArgument);
  EXPECT_THROW(ring_lattice(6, 6, 1.0), InvalidArgument);
  EXPECT_THROW(core_periphery(2, 1, 1.0), InvalidArgument);
  EXPECT_THROW(core_periphery(3, 3, 1.0), InvalidArgument);
  EXPECT_THROW(complete_graph(4, -1.0), InvalidArgument);
  EXPECT_THROW(generate(topology::EdgeList{3, {topology::Edge{0, 1, -2.0}}}), InvalidArgument);
  EXPECT_THROW(generate(topology::EdgeList{3, {topology::Edge{0, 3, 1.0}}}), InvalidArgument);
}

TEST(Generate, DirectedEdges) {
  const auto tm = generate(topology::EdgeList{3, {topology::Edge{0, 1, 2.0, true}, topology::Edge{1, 2, 1.0}}});
  EXPECT_EQ(tm(0, 1), 2.0);
  EXPECT_EQ(tm(1, 0), 0.0);
  EXPECT_EQ(tm(2, 1), 1.0);
  EXPECT_FALSE(tm.symmetric());
}
