#pragma once

// Shared domain types for score aggregation: score matrices, choice
// problems, aggregation outcomes, winner selection and the relative
// utility metric.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace corrvote {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised on violated preconditions (bad shapes, out-of-range parameters).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// n agents x m candidates of finite real-valued estimates.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;

  explicit ScoreMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
      throw UsageError("ScoreMatrix: need at least one agent and one candidate");
    }
    if (!values_.allFinite()) {
      throw UsageError("ScoreMatrix: entries must be finite");
    }
  }

  [[nodiscard]] Index agents() const noexcept { return values_.rows(); }
  [[nodiscard]] Index candidates() const noexcept { return values_.cols(); }
  [[nodiscard]] const Matrix& values() const noexcept { return values_; }
  [[nodiscard]] double operator()(Index agent, Index candidate) const {
    return values_(agent, candidate);
  }

 private:
  Matrix values_;
};

/// Candidates with hidden utilities, the agents' estimates and an optional
/// history of estimates on disjoint training candidates.
struct ChoiceProblem {
  Vector utilities;
  ScoreMatrix scores;
  std::optional<ScoreMatrix> training_scores;

  ChoiceProblem(Vector u, ScoreMatrix s, std::optional<ScoreMatrix> training = std::nullopt)
      : utilities(std::move(u)), scores(std::move(s)), training_scores(std::move(training)) {
    if (utilities.size() != scores.candidates()) {
      throw UsageError("ChoiceProblem: utility count does not match candidate count");
    }
    if (training_scores && training_scores->agents() != scores.agents()) {
      throw UsageError("ChoiceProblem: training scores have a different agent count");
    }
  }
};

/// Per-candidate welfare plus the selected candidate. Welfare may hold
/// -infinity for a zero multiplicative welfare.
struct AggregationOutcome {
  Vector welfare;
  Index winner = 0;
};

/// Smallest index attaining the maximum welfare. -infinity is the minimum.
inline Index select_winner(const Vector& welfare) {
  if (welfare.size() == 0) {
    throw UsageError("select_winner: empty welfare vector");
  }
  Index best = 0;
  for (Index j = 1; j < welfare.size(); ++j) {
    if (welfare[j] > welfare[best]) best = j;
  }
  return best;
}

inline AggregationOutcome make_outcome(Vector welfare) {
  const Index winner = select_winner(welfare);
  return AggregationOutcome{std::move(welfare), winner};
}

/// (u(winner) - u_min) / (u_max - u_min); 1.0 when all utilities are equal.
inline double relative_utility(const Vector& utilities, Index winner) {
  if (utilities.size() < 2) {
    throw UsageError("relative_utility: need at least two candidates");
  }
  if (winner < 0 || winner >= utilities.size()) {
    throw UsageError("relative_utility: winner index out of range");
  }
  const double lo = utilities.minCoeff();
  const double hi = utilities.maxCoeff();
  if (hi == lo) return 1.0;
  return (utilities[winner] - lo) / (hi - lo);
}

/// Whether the winner is a candidate of maximal utility.
inline bool picked_best(const Vector& utilities, Index winner) {
  return utilities[winner] == utilities.maxCoeff();
}

}  // namespace corrvote
