#pragma once

// Embedded voting: agents are embedded by their normalized score history,
// every candidate gets an n x p matrix whose rows are the agent embeddings
// scaled by the square root of the agent's (non-negative) score, and the
// welfare is the product of the k_hat largest squared singular values of
// that matrix. k_hat counts the dominant directions of the embedding set.
//
// With D_j = diag(s_1j, ..., s_nj) and G = E E^T the Gram matrix of the
// embeddings, the squared singular values of D_j^1/2 E are the eigenvalues
// of D_j^1/2 G D_j^1/2, an n x n problem independent of p.

#include "corrvote/core.hpp"
#include "corrvote/preprocessing.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

namespace corrvote {

inline constexpr double kRankThreshold = 0.95;

struct SpectralDiagnostics {
  /// Descending singular values of the embedding matrix, min(n, p) of them.
  Vector singular_values_full;
  Index k_hat = 1;
};

/// Row i holds sqrt(s_ij) * e_i for a fixed candidate j.
struct CandidateSpectralMatrix {
  Matrix values;
};

namespace detail {

/// Descending eigenvalues of a symmetric PSD matrix, negatives clamped to 0.
inline Vector descending_psd_eigenvalues(const Matrix& gram) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  Vector ev = solver.eigenvalues().reverse();  // ascending -> descending
  return ev.cwiseMax(0.0);
}

/// Eigenvalues at or below this are numerical zeros of a PSD Gram matrix.
inline double zero_tolerance(const Matrix& gram) {
  const double scale = std::max(gram.diagonal().cwiseAbs().sum(), 1e-300);
  return 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace detail

inline SpectralDiagnostics estimate_k(const EmbeddingSet& embeddings) {
  const Index n = embeddings.agents();
  const Index p = embeddings.dimension();
  if (n < 1 || p < 1) throw UsageError("estimate_k: empty embedding set");
  const Index r = std::min(n, p);
  const Matrix gram = embeddings.vectors * embeddings.vectors.transpose();
  const Vector squared = detail::descending_psd_eigenvalues(gram).head(r);

  SpectralDiagnostics diag;
  diag.singular_values_full = squared.cwiseSqrt();
  const Vector& sv = diag.singular_values_full;
  const double mean = sv.sum() / static_cast<double>(r);
  if (!(mean > 0.0)) {
    diag.singular_values_full.setZero();
    diag.k_hat = 1;
    return diag;
  }
  const double cut = kRankThreshold * mean;
  Index count = 0;
  for (Index l = 0; l < r; ++l) {
    if (sv[l] > cut) ++count;
  }
  diag.k_hat = std::clamp<Index>(count, 1, r);
  return diag;
}

inline CandidateSpectralMatrix candidate_matrix(Index column_index, const Matrix& nonneg_scores,
                                                const EmbeddingSet& embeddings) {
  if (column_index < 0 || column_index >= nonneg_scores.cols()) {
    throw UsageError("candidate_matrix: column index out of range");
  }
  if (nonneg_scores.rows() != embeddings.agents()) {
    throw UsageError("candidate_matrix: score and embedding agent counts differ");
  }
  const auto column = nonneg_scores.col(column_index);
  if ((column.array() < 0.0).any()) {
    throw UsageError("candidate_matrix: negative score, expected non-negative input");
  }
  return CandidateSpectralMatrix{column.cwiseSqrt().asDiagonal() * embeddings.vectors};
}

/// Per candidate, sum of ln(lambda_l^2) over the k_hat largest singular
/// values of its candidate matrix; -infinity if one of them is zero.
inline Vector ev_welfare(const Matrix& nonneg_scores, const EmbeddingSet& embeddings,
                         Index k_hat) {
  const Index n = embeddings.agents();
  const Index r = std::min(n, embeddings.dimension());
  if (nonneg_scores.rows() != n) {
    throw UsageError("ev_welfare: score and embedding agent counts differ");
  }
  if (k_hat < 1 || k_hat > r) throw UsageError("ev_welfare: k_hat out of range");
  if ((nonneg_scores.array() < 0.0).any()) {
    throw UsageError("ev_welfare: negative score, expected non-negative input");
  }

  const Matrix gram = embeddings.vectors * embeddings.vectors.transpose();
  const Index m = nonneg_scores.cols();
  Vector welfare(m);
  Matrix scaled(n, n);
  for (Index j = 0; j < m; ++j) {
    const Vector root = nonneg_scores.col(j).cwiseSqrt();
    scaled = gram.cwiseProduct(root * root.transpose());
    const Vector squared = detail::descending_psd_eigenvalues(scaled);
    const double tol = detail::zero_tolerance(scaled);
    double w = 0.0;
    for (Index l = 0; l < k_hat; ++l) {
      if (squared[l] <= tol) {
        w = kNegInf;
        break;
      }
      w += std::log(squared[l]);
    }
    welfare[j] = w;
  }
  return welfare;
}

struct EmbeddedVotingResult {
  AggregationOutcome outcome;
  SpectralDiagnostics diagnostics;
};

/// EV without training, EV+ with. Embeddings, k_hat and the mean-2 shift all
/// use statistics of the current and training columns together.
inline EmbeddedVotingResult embedded_voting(const ScoreMatrix& scores,
                                            const std::optional<ScoreMatrix>& training = {}) {
  if (scores.candidates() < 2) {
    throw UsageError("embedded_voting: need at least two candidates");
  }
  const Matrix basis = concatenate(scores, training);
  const RowStatistics stats = row_statistics(basis);
  const EmbeddingSet embeddings = compute_embeddings(basis, stats);
  SpectralDiagnostics diag = estimate_k(embeddings);
  Matrix nonneg = standardize_with(scores.values(), stats);
  nonneg = (nonneg.array() + 2.0).cwiseMax(0.0).matrix();
  Vector welfare = ev_welfare(nonneg, embeddings, diag.k_hat);
  return EmbeddedVotingResult{make_outcome(std::move(welfare)), std::move(diag)};
}

}  // namespace corrvote
