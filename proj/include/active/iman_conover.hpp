#pragma once

// Iman-Conover rank-correlation induction. Each output column is a
// rearrangement of the matching input column, so marginals are kept exactly.

#include <Eigen/Dense>

#include "active/random.hpp"

namespace active {

// How target entries are read. Spearman converts each target rank correlation
// to the normal-score correlation 2 sin(pi rho / 6) that produces it, so the
// achieved Spearman correlation matches the target. ScoreCorrelation feeds
// the matrix to the Cholesky step unchanged.
enum class RankTarget { Spearman, ScoreCorrelation };

// Lower-triangular L with L L^T = m. Zero pivots are allowed so that
// singular targets such as rho = 1 work; a pivot below -tol throws
// DomainError (matrix not positive semidefinite).
Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& m, double tol = 1e-12);

// van der Waerden scores Phi^{-1}(i / (n + 1)), i = 1..n.
Eigen::VectorXd van_der_waerden_scores(Eigen::Index n);

// data: n x K samples; target_corr: K x K symmetric, unit diagonal.
// The scores are permuted independently per column, decorrelated with the
// Cholesky factor of their sample correlation, multiplied by the target
// factor, and the data columns are reordered to the resulting ranks.
Eigen::MatrixXd iman_conover(const Eigen::MatrixXd& data, const Eigen::MatrixXd& target_corr,
                             Rng& rng, RankTarget target = RankTarget::Spearman);

// Two-column convenience: target matrix [[1, rho], [rho, 1]].
Eigen::MatrixXd iman_conover_pair(const Eigen::MatrixXd& data, double rho, Rng& rng,
                                  RankTarget target = RankTarget::Spearman);

}  // namespace active
