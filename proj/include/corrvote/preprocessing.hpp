#pragma once

// Per-agent score normalizations and the score-based agent embeddings.
// All statistics use the population standard deviation (divide by the
// number of columns).

#include "corrvote/core.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace corrvote {

/// Per-agent mean and population standard deviation of a score history.
struct RowStatistics {
  Vector mean;
  Vector stddev;
  /// Rows whose spread is negligible relative to their magnitude.
  Eigen::Array<bool, Eigen::Dynamic, 1> constant;
};

inline RowStatistics row_statistics(const Matrix& scores) {
  const Index n = scores.rows();
  const auto p = static_cast<double>(scores.cols());
  RowStatistics stats{Vector(n), Vector(n), Eigen::Array<bool, Eigen::Dynamic, 1>(n)};
  for (Index i = 0; i < n; ++i) {
    const auto row = scores.row(i).array();
    const double mean = row.sum() / p;
    const double sd = std::sqrt((row - mean).square().sum() / p);
    const double scale = row.abs().maxCoeff();
    stats.mean[i] = mean;
    stats.stddev[i] = sd;
    stats.constant[i] = !(sd > 1e-12 * scale);
  }
  return stats;
}

/// z-scores `scores` with externally supplied statistics; constant rows map to 0.
inline Matrix standardize_with(const Matrix& scores, const RowStatistics& stats) {
  Matrix z(scores.rows(), scores.cols());
  for (Index i = 0; i < scores.rows(); ++i) {
    if (stats.constant[i]) {
      z.row(i).setZero();
    } else {
      z.row(i) = (scores.row(i).array() - stats.mean[i]) / stats.stddev[i];
    }
  }
  return z;
}

/// Current scores followed by the training history, column-wise.
inline Matrix concatenate(const ScoreMatrix& current, const std::optional<ScoreMatrix>& training) {
  if (!training) return current.values();
  if (training->agents() != current.agents()) {
    throw UsageError("concatenate: training scores have a different agent count");
  }
  Matrix all(current.agents(), current.candidates() + training->candidates());
  all << current.values(), training->values();
  return all;
}

namespace detail {
inline void require_two_columns(Index p, const char* what) {
  if (p < 2) throw UsageError(std::string(what) + ": need at least two candidates");
}
}  // namespace detail

/// Each row rescaled to zero mean and unit standard deviation.
inline ScoreMatrix standardize_rows(const ScoreMatrix& scores) {
  detail::require_two_columns(scores.candidates(), "standardize_rows");
  return ScoreMatrix(standardize_with(scores.values(), row_statistics(scores.values())));
}

/// Standardized scores of `current` shifted to `target_mean` and clamped
/// from below at `floor`; statistics come from `basis`.
inline Matrix shift_to_positive_with(const Matrix& current, const Matrix& basis, double target_mean,
                                     double floor) {
  Matrix shifted = standardize_with(current, row_statistics(basis));
  shifted.array() += target_mean;
  return shifted.cwiseMax(floor);
}

inline ScoreMatrix shift_to_positive(const ScoreMatrix& scores, double target_mean, double floor) {
  detail::require_two_columns(scores.candidates(), "shift_to_positive");
  return ScoreMatrix(shift_to_positive_with(scores.values(), scores.values(), target_mean, floor));
}

/// n agent embeddings of length p. Rows have unit norm except the all-zero
/// fallback rows of agents whose scores are constant.
struct EmbeddingSet {
  Matrix vectors;

  [[nodiscard]] Index agents() const noexcept { return vectors.rows(); }
  [[nodiscard]] Index dimension() const noexcept { return vectors.cols(); }
};

/// z-scores every agent's full score history, then divides by sqrt(p) so each
/// embedding has unit Euclidean norm.
inline EmbeddingSet compute_embeddings(const Matrix& basis, const RowStatistics& stats) {
  detail::require_two_columns(basis.cols(), "compute_embeddings");
  Matrix e = standardize_with(basis, stats);
  e /= std::sqrt(static_cast<double>(basis.cols()));
  return EmbeddingSet{std::move(e)};
}

inline EmbeddingSet compute_embeddings(const Matrix& basis) {
  return compute_embeddings(basis, row_statistics(basis));
}

inline EmbeddingSet compute_embeddings(const ScoreMatrix& basis) {
  return compute_embeddings(basis.values());
}

}  // namespace corrvote
