#pragma once

// Maximum-likelihood aggregation. Under Gaussian noise with covariance
// Sigma, the likelihood-maximizing utility of a candidate is the weighted
// average sum_i w_i s_i / sum_i w_i with w = 1^T Sigma^+. GA uses the true
// model covariance; ML and ML+ plug in the empirical covariance of the
// observed (standardized) scores.

#include "corrvote/core.hpp"
#include "corrvote/noise_model.hpp"
#include "corrvote/preprocessing.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <stdexcept>

namespace corrvote {

inline constexpr double kPinvRelativeCutoff = 1e-10;
inline constexpr double kDegenerateTotal = 1e-12;

class DegenerateWeightsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weights may be negative; that is how an ill-conditioned covariance shows up.
struct WeightVector {
  Vector weights;
  double total = 0.0;

  static WeightVector from(Vector w) {
    const double total = w.sum();
    return WeightVector{std::move(w), total};
  }
  static WeightVector uniform(Index n) { return from(Vector::Ones(n)); }
  [[nodiscard]] bool has_negative() const { return (weights.array() < 0.0).any(); }
};

/// Moore-Penrose pseudo-inverse of a symmetric matrix; eigenvalues at or
/// below 1e-10 times the largest one are dropped.
inline Matrix symmetric_pinv(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  const Vector& ev = solver.eigenvalues();
  const double lambda_max = ev.cwiseAbs().maxCoeff();
  const double cutoff = kPinvRelativeCutoff * lambda_max;
  Vector inv(ev.size());
  for (Index l = 0; l < ev.size(); ++l) {
    inv[l] = std::abs(ev[l]) > cutoff ? 1.0 / ev[l] : 0.0;
  }
  const Matrix& v = solver.eigenvectors();
  return v * inv.asDiagonal() * v.transpose();
}

inline WeightVector weights_from_covariance(const CovarianceMatrix& sigma) {
  if (sigma.values.rows() != sigma.values.cols() || sigma.values.rows() < 1) {
    throw UsageError("weights_from_covariance: covariance must be square and non-empty");
  }
  return WeightVector::from(symmetric_pinv(sigma.values).rowwise().sum());
}

/// Weighted average of every column. Throws DegenerateWeightsError when the
/// total weight is numerically zero.
inline Vector ml_estimate(const Matrix& scores, const WeightVector& w) {
  if (scores.rows() != w.weights.size()) {
    throw UsageError("ml_estimate: weight count does not match agent count");
  }
  if (!(std::abs(w.total) > kDegenerateTotal)) {
    throw DegenerateWeightsError("ml_estimate: total weight is numerically zero");
  }
  return (scores.transpose() * w.weights) / w.total;
}

/// Population covariance of the standardized rows (agents are variables,
/// candidates are samples).
inline CovarianceMatrix empirical_covariance(const Matrix& observed) {
  if (observed.cols() < 2) {
    throw UsageError("empirical_covariance: need at least two candidates");
  }
  const Matrix z = standardize_with(observed, row_statistics(observed));
  Matrix cov = (z * z.transpose()) / static_cast<double>(observed.cols());
  return CovarianceMatrix{std::move(cov)};
}

inline CovarianceMatrix empirical_covariance(const ScoreMatrix& observed) {
  return empirical_covariance(observed.values());
}

struct LikelihoodResult {
  AggregationOutcome outcome;
  /// Uniform weights replaced a degenerate weight vector.
  bool fallback = false;
  bool negative_weights = false;
};

namespace detail {
inline LikelihoodResult weighted_choice(const Matrix& scores, const WeightVector& w) {
  LikelihoodResult result;
  result.negative_weights = w.has_negative();
  Vector estimate;
  try {
    estimate = ml_estimate(scores, w);
  } catch (const DegenerateWeightsError&) {
    result.fallback = true;
    estimate = ml_estimate(scores, WeightVector::uniform(scores.rows()));
  }
  result.outcome = make_outcome(std::move(estimate));
  return result;
}
}  // namespace detail

/// GA with precomputed model weights, on raw scores.
inline LikelihoodResult ga_rule(const ScoreMatrix& scores, const WeightVector& model_weights) {
  return detail::weighted_choice(scores.values(), model_weights);
}

inline LikelihoodResult ga_rule(const ScoreMatrix& scores, const EmbeddingMatrix& embedding,
                                const NoiseParams& params) {
  if (embedding.agents() != scores.agents()) {
    throw UsageError("ga_rule: embedding and score agent counts differ");
  }
  return ga_rule(scores, weights_from_covariance(model_covariance(embedding, params)));
}

/// ML without training, ML+ with. Standardization and the covariance
/// estimate use the current and training columns together.
inline LikelihoodResult ml_rule(const ScoreMatrix& scores,
                                const std::optional<ScoreMatrix>& training = {}) {
  if (scores.candidates() < 2) throw UsageError("ml_rule: need at least two candidates");
  const Matrix basis = concatenate(scores, training);
  const RowStatistics stats = row_statistics(basis);
  const Matrix z_basis = standardize_with(basis, stats);
  const Matrix sigma_hat = (z_basis * z_basis.transpose()) / static_cast<double>(basis.cols());
  const WeightVector w = weights_from_covariance(CovarianceMatrix{sigma_hat});
  return detail::weighted_choice(z_basis.leftCols(scores.candidates()), w);
}

}  // namespace corrvote
