#include "corrvote/core.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

using namespace corrvote;

namespace {
Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}
}  // namespace

TEST(SelectWinner, UniqueMaximum) { EXPECT_EQ(select_winner(vec({1.0, 3.0, 2.0})), 1); }

TEST(SelectWinner, TieGoesToLowestIndex) { EXPECT_EQ(select_winner(vec({5.0, 5.0, 1.0})), 0); }

TEST(SelectWinner, AllSentinels) { EXPECT_EQ(select_winner(vec({kNegInf, kNegInf})), 0); }

TEST(SelectWinner, SentinelIsMinimum) {
  EXPECT_EQ(select_winner(vec({kNegInf, -1e300, kNegInf})), 1);
}

TEST(SelectWinner, EmptyIsUsageError) { EXPECT_THROW(select_winner(Vector()), UsageError); }

TEST(SelectWinner, PermutationCovariant) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> level(0, 3);  // coarse values force ties
  for (int rep = 0; rep < 200; ++rep) {
    const Index m = 2 + rep % 7;
    Vector w(m);
    for (Index j = 0; j < m; ++j) w[j] = level(rng);
    std::vector<Index> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Vector permuted(m);
    for (Index j = 0; j < m; ++j) permuted[j] = w[perm[static_cast<std::size_t>(j)]];

    const Index winner = select_winner(permuted);
    const double top = w.maxCoeff();
    EXPECT_EQ(permuted[winner], top);
    for (Index j = 0; j < winner; ++j) EXPECT_LT(permuted[j], top);
  }
}

TEST(RelativeUtility, Substitution) {
  EXPECT_DOUBLE_EQ(relative_utility(vec({-1, 0, 3}), 1), 0.25);
  EXPECT_DOUBLE_EQ(relative_utility(vec({-1, 0, 3}), 2), 1.0);
}

TEST(RelativeUtility, ConstantUtilitiesAreOptimal) {
  EXPECT_DOUBLE_EQ(relative_utility(vec({2, 2, 2}), 0), 1.0);
}

TEST(RelativeUtility, NeedsTwoCandidates) {
  EXPECT_THROW(relative_utility(vec({1.0}), 0), UsageError);
  EXPECT_THROW(relative_utility(vec({1.0, 2.0}), 2), UsageError);
}

TEST(RelativeUtility, EndpointsOnRandomVectors) {
  std::mt19937 rng(11);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 100; ++rep) {
    Vector u(10);
    for (Index j = 0; j < u.size(); ++j) u[j] = normal(rng);
    Index best = 0, worst = 0;
    u.maxCoeff(&best);
    u.minCoeff(&worst);
    EXPECT_DOUBLE_EQ(relative_utility(u, best), 1.0);
    EXPECT_DOUBLE_EQ(relative_utility(u, worst), 0.0);
    for (Index j = 0; j < u.size(); ++j) {
      const double r = relative_utility(u, j);
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 1.0);
    }
  }
}

TEST(ScoreMatrix, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(ScoreMatrix(Matrix(0, 3)), UsageError);
  Matrix bad = Matrix::Zero(2, 2);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(ScoreMatrix{bad}, UsageError);
}

TEST(ChoiceProblem, ShapeChecks) {
  EXPECT_THROW(ChoiceProblem(Vector::Zero(3), ScoreMatrix(Matrix::Zero(2, 2))), UsageError);
  EXPECT_THROW(ChoiceProblem(Vector::Zero(2), ScoreMatrix(Matrix::Zero(2, 2)),
                             ScoreMatrix(Matrix::Zero(3, 5))),
               UsageError);
}
