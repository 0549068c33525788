#pragma once

// Gaussian noise model with shared feature noise and distinct per-agent
// noise, plus the embedding matrices for each studied scenario.

#include "corrvote/core.hpp"
#include "corrvote/random.hpp"

#include <cmath>
#include <boost/random/normal_distribution.hpp>

#include <optional>
#include <string>

namespace corrvote {

inline constexpr double kUnitRowTolerance = 1e-9;

/// n x k matrix placing agents in a feature space. Rows have unit norm.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;

  explicit EmbeddingMatrix(Matrix values) : values_(std::move(values)) {
    if (auto bad = first_invalid_row(values_)) {
      throw UsageError("EmbeddingMatrix: row " + std::to_string(*bad) +
                       " is zero or does not have unit Euclidean norm");
    }
  }

  /// Index of the first row breaking the unit-norm / non-zero invariant.
  static std::optional<Index> first_invalid_row(const Matrix& values) {
    if (values.rows() < 1 || values.cols() < 1) return Index{0};
    for (Index i = 0; i < values.rows(); ++i) {
      const auto row = values.row(i);
      if (!row.allFinite() || row.cwiseAbs().maxCoeff() == 0.0 ||
          std::abs(row.norm() - 1.0) > kUnitRowTolerance) {
        return i;
      }
    }
    return std::nullopt;
  }

  [[nodiscard]] Index agents() const noexcept { return values_.rows(); }
  [[nodiscard]] Index features() const noexcept { return values_.cols(); }
  [[nodiscard]] const Matrix& values() const noexcept { return values_; }

 private:
  Matrix values_;
};

struct NoiseParams {
  double sigma_d = 0.1;
  double sigma_f = 1.0;

  void validate() const {
    if (!(sigma_d >= 0.0) || !(sigma_f >= 0.0) || !std::isfinite(sigma_d) ||
        !std::isfinite(sigma_f)) {
      throw UsageError("NoiseParams: intensities must be finite and non-negative");
    }
  }
};

/// Noise covariance sigma_d^2 I + sigma_f^2 E E^T.
struct CovarianceMatrix {
  Matrix values;
};

/// group_size clones on the first feature followed by n_independent agents
/// each owning a private feature.
inline EmbeddingMatrix build_reference_embedding(Index group_size, Index n_independent) {
  if (group_size < 0 || n_independent < 0 || group_size + n_independent < 1) {
    throw UsageError("build_reference_embedding: need at least one agent");
  }
  const Index n = group_size + n_independent;
  Matrix e = Matrix::Zero(n, 1 + n_independent);
  for (Index i = 0; i < group_size; ++i) e(i, 0) = 1.0;
  for (Index t = 0; t < n_independent; ++t) e(group_size + t, 1 + t) = 1.0;
  return EmbeddingMatrix(std::move(e));
}

/// Group block G_alpha with raw entries alpha^|i-i'| (0^0 = 1), rows scaled to
/// unit norm, followed by an identity block for the independent agents.
inline EmbeddingMatrix build_cohesion_embedding(double alpha, Index group_size = 20,
                                                Index n_independent = 4) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw UsageError("build_cohesion_embedding: alpha must lie in [0, 1]");
  }
  if (group_size < 0 || n_independent < 0 || group_size + n_independent < 1) {
    throw UsageError("build_cohesion_embedding: need at least one agent");
  }
  const Index n = group_size + n_independent;
  Matrix e = Matrix::Zero(n, n);
  for (Index i = 0; i < group_size; ++i) {
    for (Index l = 0; l < group_size; ++l) {
      const auto dist = static_cast<double>(i > l ? i - l : l - i);
      e(i, l) = dist == 0.0 ? 1.0 : std::pow(alpha, dist);
    }
    e.row(i).head(group_size) /= e.row(i).head(group_size).norm();
  }
  for (Index t = 0; t < n_independent; ++t) e(group_size + t, group_size + t) = 1.0;
  return EmbeddingMatrix(std::move(e));
}

/// Reference layout where independent agent t leaks c*beta onto the group
/// feature and keeps c*(1-beta) on its own, c = 1/sqrt(beta^2 + (1-beta)^2).
inline EmbeddingMatrix build_absorption_embedding(double beta, Index group_size = 20,
                                                  Index n_independent = 4) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw UsageError("build_absorption_embedding: beta must lie in [0, 1]");
  }
  if (group_size < 0 || n_independent < 0 || group_size + n_independent < 1) {
    throw UsageError("build_absorption_embedding: need at least one agent");
  }
  const Index n = group_size + n_independent;
  const double c = 1.0 / std::sqrt(beta * beta + (1.0 - beta) * (1.0 - beta));
  Matrix e = Matrix::Zero(n, 1 + n_independent);
  for (Index i = 0; i < group_size; ++i) e(i, 0) = 1.0;
  for (Index t = 0; t < n_independent; ++t) {
    e(group_size + t, 0) = c * beta;
    e(group_size + t, 1 + t) = c * (1.0 - beta);
  }
  return EmbeddingMatrix(std::move(e));
}

inline CovarianceMatrix model_covariance(const EmbeddingMatrix& embedding,
                                         const NoiseParams& params) {
  params.validate();
  Matrix sigma = (params.sigma_f * params.sigma_f) *
                 (embedding.values() * embedding.values().transpose());
  sigma.diagonal().array() += params.sigma_d * params.sigma_d;
  return CovarianceMatrix{std::move(sigma)};
}

struct SampledScores {
  Vector utilities;
  Matrix scores;
};

/// Draws m candidates. Per candidate the draw order is the utility, then the
/// n distinct noises, then the k feature noises.
inline SampledScores sample_scores(const EmbeddingMatrix& embedding, const NoiseParams& params,
                                   Index m, Engine& rng) {
  const Index n = embedding.agents();
  const Index k = embedding.features();
  boost::random::normal_distribution<double> normal(0.0, 1.0);  // ziggurat
  Vector u(m);
  Matrix distinct(n, m);
  Matrix feature(k, m);
  for (Index j = 0; j < m; ++j) {
    u[j] = normal(rng);
    for (Index i = 0; i < n; ++i) distinct(i, j) = normal(rng);
    for (Index l = 0; l < k; ++l) feature(l, j) = normal(rng);
  }
  Matrix s = params.sigma_d * distinct;
  s.noalias() += params.sigma_f * (embedding.values() * feature);
  s.rowwise() += u.transpose();
  return SampledScores{std::move(u), std::move(s)};
}

/// Samples m current candidates from `rng` and m_train disjoint training
/// candidates from `training_rng`.
inline ChoiceProblem sample_problem(const EmbeddingMatrix& embedding, const NoiseParams& params,
                                    Index m, Index m_train, Engine& rng, Engine& training_rng) {
  if (m < 1) throw UsageError("sample_problem: need at least one candidate");
  if (m_train < 0) throw UsageError("sample_problem: negative training size");
  params.validate();
  SampledScores current = sample_scores(embedding, params, m, rng);
  std::optional<ScoreMatrix> training;
  if (m_train > 0) {
    training = ScoreMatrix(sample_scores(embedding, params, m_train, training_rng).scores);
  }
  return ChoiceProblem(std::move(current.utilities), ScoreMatrix(std::move(current.scores)),
                       std::move(training));
}

/// Single-source variant: training candidates are drawn after the current ones.
inline ChoiceProblem sample_problem(const EmbeddingMatrix& embedding, const NoiseParams& params,
                                    Index m, Index m_train, Engine& rng) {
  return sample_problem(embedding, params, m, m_train, rng, rng);
}

}  // namespace corrvote
