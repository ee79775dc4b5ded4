#include "titlesim/transport.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.h"
#include "test_support.h"
#include "titlesim/error.h"

namespace titlesim {
namespace {

std::vector<double> random_weights(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& x : w) sum += (x = u(rng));
  for (auto& x : w) x /= sum;
  return w;
}

void expect_feasible(const TransportPlan& plan, std::span<const double> s,
                     std::span<const double> d, const Matrix& costs) {
  double objective = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      EXPECT_GE(plan.flows(i, j), 0.0);
      row += plan.flows(i, j);
      objective += plan.flows(i, j) * costs(i, j);
    }
    EXPECT_NEAR(row, s[i], 1e-9);
  }
  for (std::size_t j = 0; j < d.size(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) col += plan.flows(i, j);
    EXPECT_NEAR(col, d[j], 1e-9);
  }
  EXPECT_NEAR(objective, plan.objective, 1e-9);
}

TEST(GroundCostTest, ThreeFourFive) {
  DiscreteDistribution a{{{0, 0}}, {1.0}}, b{{{3, 4}}, {1.0}};
  EXPECT_EQ(ground_cost_matrix(a, b)(0, 0), 5.0);
}

TEST(GroundCostTest, IdenticalSetsHaveZeroDiagonal) {
  DiscreteDistribution a{{{0, 1}, {2, 3}, {-1, 5}}, {0.2, 0.3, 0.5}};
  const auto c = ground_cost_matrix(a, a);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(c(i, i), 0.0);
}

TEST(GroundCostTest, DimensionMismatchIsAnError) {
  DiscreteDistribution a{{{0, 0}}, {1.0}}, b{{{0, 0, 0}}, {1.0}};
  EXPECT_THROW(ground_cost_matrix(a, b), std::invalid_argument);
}

TEST(SolveTransportTest, SingleSinkForcesThePlan) {
  Matrix c(2, 1);
  c(0, 0) = 0.5;
  c(1, 0) = 0.5;
  const std::vector<double> s{0.5, 0.5}, d{1.0};
  const auto plan = solve_transport(s, d, c);
  EXPECT_DOUBLE_EQ(plan.objective, 0.5);
  EXPECT_DOUBLE_EQ(plan.flows(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(plan.flows(1, 0), 0.5);
}

TEST(SolveTransportTest, OneByOne) {
  Matrix c(1, 1, 2.75);
  const std::vector<double> one{1.0};
  EXPECT_EQ(solve_transport(one, one, c).objective, 2.75);
}

// Frozen from the vertex-enumeration oracle (4 spanning trees of K_{2,2}):
// optimum 1.3 at flows [[0.4, 0.3], [0, 0.3]].
TEST(SolveTransportTest, TwoByTwoMatchesEnumeratedVertex) {
  Matrix c(2, 2);
  c(0, 0) = 1;
  c(0, 1) = 2;
  c(1, 0) = 3;
  c(1, 1) = 1;
  const std::vector<double> s{0.7, 0.3}, d{0.4, 0.6};
  const auto plan = solve_transport(s, d, c);
  EXPECT_NEAR(plan.objective, 1.3, 1e-12);
  EXPECT_NEAR(plan.flows(0, 0), 0.4, 1e-12);
  EXPECT_NEAR(plan.flows(0, 1), 0.3, 1e-12);
  EXPECT_NEAR(plan.flows(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(plan.flows(1, 1), 0.3, 1e-12);
}

TEST(SolveTransportTest, RejectsInfeasibleMarginalsAndNegativeCosts) {
  Matrix c(1, 2, 1.0);
  EXPECT_THROW(solve_transport(std::vector<double>{1.0},
                               std::vector<double>{0.5, 0.6}, c),
               Error);
  c(0, 1) = -0.1;
  EXPECT_THROW(solve_transport(std::vector<double>{1.0},
                               std::vector<double>{0.5, 0.5}, c),
               Error);
  Matrix ok(1, 2, 1.0);
  EXPECT_THROW(solve_transport(std::vector<double>{1.0},
                               std::vector<double>{0.0, 1.0}, ok),
               std::invalid_argument);
  EXPECT_THROW(solve_transport(std::vector<double>{1.0},
                               std::vector<double>{1.0}, ok),
               std::invalid_argument);
}

TEST(SolveTransportTest, MatchesVertexEnumerationOnSmallInstances) {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<std::size_t> size(1, 5);
  std::uniform_real_distribution<double> cost(0.0, 10.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = size(rng), n = size(rng);
    const auto s = random_weights(m, rng);
    const auto d = random_weights(n, rng);
    Matrix c(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) c(i, j) = cost(rng);
    }
    const auto plan = solve_transport(s, d, c);
    expect_feasible(plan, s, d, c);
    const auto best = oracle::transport_optimum(s, d, c);
    EXPECT_NEAR(plan.objective, best.objective, 1e-8 * std::max(1.0, best.objective))
        << m << "x" << n;
  }
}

TEST(SolveTransportTest, DegenerateInstancesTerminateOptimally) {
  // Equal uniform marginals make every northwest-corner step degenerate;
  // integer costs add ties in the reduced costs.
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> cost(0, 3);
  for (std::size_t n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const std::vector<double> u(n, 1.0 / static_cast<double>(n));
      Matrix c(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) c(i, j) = cost(rng);
      }
      const auto plan = solve_transport(u, u, c);
      expect_feasible(plan, u, u, c);
      EXPECT_NEAR(plan.objective, oracle::transport_optimum(u, u, c).objective, 1e-9);
    }
  }
}

TEST(SolveTransportTest, DeterministicOutput) {
  std::mt19937_64 rng(5);
  const auto s = random_weights(7, rng);
  const auto d = random_weights(9, rng);
  Matrix c(7, 9);
  std::uniform_real_distribution<double> cost(0.0, 1.0);
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = 0; j < 9; ++j) c(i, j) = cost(rng);
  }
  const auto a = solve_transport(s, d, c);
  const auto b = solve_transport(s, d, c);
  EXPECT_EQ(a.flows, b.flows);
  EXPECT_EQ(a.objective, b.objective);
}

EmbeddingTable planted_table() {
  EmbeddingTable t(2);
  t.add("java", std::vector<double>{0, 0});
  t.add("ny", std::vector<double>{4, 0});
  t.add("developer", std::vector<double>{0, 3});
  t.add("engineer", std::vector<double>{1, 1});
  return t;
}

NBow bag(std::vector<NBow::Entry> entries) { return NBow(std::move(entries)); }

TEST(WmdTest, IdentityIsZero) {
  const auto t = planted_table();
  const auto a = bag({{"developer", 0.25}, {"java", 0.5}, {"ny", 0.25}});
  EXPECT_NEAR(wmd(a, a, t), 0.0, 1e-12);
}

TEST(WmdTest, SingleWordDocumentsGiveTheVectorDistance) {
  const auto t = planted_table();
  EXPECT_DOUBLE_EQ(wmd(bag({{"ny", 1.0}}), bag({{"developer", 1.0}}), t), 5.0);
  EXPECT_DOUBLE_EQ(wcd(bag({{"ny", 1.0}}), bag({{"developer", 1.0}}), t), 5.0);
}

// Frozen from the vertex-enumeration oracle on the 2x2 cost matrix
// [[3, 0], [5, 4]] with supplies (2/3, 1/3) and demands (1/2, 1/2): 13/6.
TEST(WmdTest, PlantedTwoByTwoMatchesOracle) {
  const auto t = planted_table();
  const auto a = bag({{"java", 2.0 / 3.0}, {"ny", 1.0 / 3.0}});
  const auto b = bag({{"developer", 0.5}, {"java", 0.5}});
  EXPECT_NEAR(wmd(a, b, t), 13.0 / 6.0, 1e-12);
  EXPECT_LE(wcd(a, b, t), wmd(a, b, t) + 1e-9);
}

TEST(WmdTest, OutOfVocabularyMassIsDroppedAndRenormalized) {
  const auto t = planted_table();
  const auto a = bag({{"java", 0.5}, {"zzz", 0.5}});
  EXPECT_DOUBLE_EQ(wmd(a, bag({{"ny", 1.0}}), t), 4.0);
  EXPECT_THROW(wmd(bag({{"zzz", 1.0}}), a, t), UnrepresentableError);
  EXPECT_THROW(wcd(a, bag({{"qqq", 1.0}}), t), UnrepresentableError);
}

TEST(WmdTest, MetricAxiomsAndLowerBoundOnRandomDocuments) {
  std::mt19937_64 rng(77);
  const auto t = testing::random_table(30, 6, rng);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = nbow(testing::random_doc(t, 1, 6, rng));
    const auto b = nbow(testing::random_doc(t, 1, 6, rng));
    const auto c = nbow(testing::random_doc(t, 1, 6, rng));
    const double ab = wmd(a, b, t), ba = wmd(b, a, t);
    EXPECT_NEAR(wmd(a, a, t), 0.0, 1e-12);
    EXPECT_NEAR(ab, ba, 1e-9);
    EXPECT_LE(wmd(a, c, t), ab + wmd(b, c, t) + 1e-9);
    EXPECT_LE(wcd(a, b, t), ab + 1e-9);
  }
}

TEST(WmdTest, ScaleCovariance) {
  std::mt19937_64 rng(8);
  const auto t = testing::random_table(20, 4, rng);
  for (double s : {0.1, 3.0, 250.0}) {
    const auto scaled = t.scaled(s);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = nbow(testing::random_doc(t, 1, 5, rng));
      const auto b = nbow(testing::random_doc(t, 1, 5, rng));
      EXPECT_NEAR(wmd(a, b, scaled), s * wmd(a, b, t), 1e-9 * s * wmd(a, b, t) + 1e-12);
      EXPECT_NEAR(wcd(a, b, scaled), s * wcd(a, b, t), 1e-9 * s * wcd(a, b, t) + 1e-12);
    }
  }
}

TEST(WmdTest, DistributionRouteAgreesWithTableRoute) {
  std::mt19937_64 rng(17);
  const auto t = testing::random_table(15, 3, rng);
  const auto a = resolve(nbow(testing::random_doc(t, 2, 5, rng)), t);
  const auto b = resolve(nbow(testing::random_doc(t, 2, 5, rng)), t);
  const auto da = to_distribution(a, t), db = to_distribution(b, t);
  const auto plan = solve_transport(da.weights, db.weights, ground_cost_matrix(da, db));
  EXPECT_EQ(plan.objective, wmd(a, b, t));
}

}  // namespace
}  // namespace titlesim
