#pragma once

// Welfare rules that ignore correlations: range voting, approval voting,
// Nash product, a single agent's opinion and a uniformly random pick.

#include "corrvote/core.hpp"
#include "corrvote/preprocessing.hpp"
#include "corrvote/random.hpp"

#include <cmath>
#include <random>

namespace corrvote {

/// Sum of standardized scores.
inline AggregationOutcome range_voting(const ScoreMatrix& scores) {
  const ScoreMatrix z = standardize_rows(scores);
  return make_outcome(z.values().colwise().sum().transpose());
}

/// Approval count at threshold 0 on standardized scores. Among candidates
/// tied at the top count the winner maximizes the product of the strictly
/// positive scores of its approvers, then the lowest index.
inline AggregationOutcome approval_voting(const ScoreMatrix& scores) {
  const Matrix z = standardize_rows(scores).values();
  const Index m = z.cols();
  Vector approvals(m);
  Vector log_product(m);  // empty product -> log 1 = 0
  for (Index j = 0; j < m; ++j) {
    double count = 0.0;
    double lp = 0.0;
    for (Index i = 0; i < z.rows(); ++i) {
      const double s = z(i, j);
      if (s >= 0.0) {
        count += 1.0;
        if (s > 0.0) lp += std::log(s);
      }
    }
    approvals[j] = count;
    log_product[j] = lp;
  }
  const double top = approvals.maxCoeff();
  Index winner = -1;
  for (Index j = 0; j < m; ++j) {
    if (approvals[j] != top) continue;
    if (winner < 0 || log_product[j] > log_product[winner]) winner = j;
  }
  return AggregationOutcome{std::move(approvals), winner};
}

/// Sum of logs of scores shifted to mean 2 and floored at 0.1.
inline AggregationOutcome nash_product(const ScoreMatrix& scores) {
  const ScoreMatrix positive = shift_to_positive(scores, 2.0, 0.1);
  return make_outcome(positive.values().array().log().colwise().sum().transpose());
}

inline AggregationOutcome single_agent(const ScoreMatrix& scores, Index agent_index = 0) {
  if (agent_index < 0 || agent_index >= scores.agents()) {
    throw UsageError("single_agent: agent index out of range");
  }
  const ScoreMatrix z = standardize_rows(scores);
  return make_outcome(z.values().row(agent_index).transpose());
}

inline AggregationOutcome random_winner(Index m, Engine& rng) {
  if (m < 1) throw UsageError("random_winner: need at least one candidate");
  std::uniform_int_distribution<Index> pick(0, m - 1);
  return AggregationOutcome{Vector::Zero(m), pick(rng)};
}

}  // namespace corrvote
