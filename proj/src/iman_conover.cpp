#include "active/iman_conover.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "active/error.hpp"
#include "active/normal.hpp"

namespace active {

Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& m, double tol) {
  const Eigen::Index K = m.rows();
  if (m.cols() != K) throw ParameterError("Cholesky needs a square matrix");
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index j = 0; j < K; ++j) {
    double pivot = m(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= L(j, k) * L(j, k);
    if (pivot < -tol) throw DomainError("correlation matrix is not positive semidefinite");
    const double d = pivot > tol ? std::sqrt(pivot) : 0.0;
    L(j, j) = d;
    for (Eigen::Index i = j + 1; i < K; ++i) {
      double s = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      if (d == 0.0) {
        // The row must already be reproduced by the earlier columns.
        if (std::abs(s) > std::sqrt(tol)) {
          throw DomainError("correlation matrix is not positive semidefinite");
        }
        L(i, j) = 0.0;
      } else {
        L(i, j) = s / d;
      }
    }
  }
  return L;
}

Eigen::VectorXd van_der_waerden_scores(Eigen::Index n) {
  Eigen::VectorXd a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i) = normal_quantile(static_cast<double>(i + 1) / static_cast<double>(n + 1));
  }
  return a;
}

Eigen::MatrixXd iman_conover(const Eigen::MatrixXd& data, const Eigen::MatrixXd& target_corr,
                             Rng& rng, RankTarget target) {
  const Eigen::Index n = data.rows(), K = data.cols();
  if (n < 2 || K < 1) throw ParameterError("Iman-Conover needs at least 2 rows and 1 column");
  if (target_corr.rows() != K || target_corr.cols() != K) {
    throw ParameterError("target correlation must be K x K");
  }
  Eigen::MatrixXd C = target_corr;
  for (Eigen::Index i = 0; i < K; ++i) {
    if (std::abs(C(i, i) - 1.0) > 1e-12) throw ParameterError("target correlation needs a unit diagonal");
    for (Eigen::Index j = 0; j < K; ++j) {
      if (std::abs(target_corr(i, j) - target_corr(j, i)) > 1e-12) throw ParameterError("target correlation is not symmetric");
      if (!(std::abs(target_corr(i, j)) <= 1.0)) throw ParameterError("target correlation entries must lie in [-1, 1]");
      if (i != j && target == RankTarget::Spearman) {
        C(i, j) = 2.0 * std::sin(std::numbers::pi * target_corr(i, j) / 6.0);
      }
    }
  }
  const Eigen::MatrixXd P = psd_cholesky(C);

  const Eigen::VectorXd a = van_der_waerden_scores(n);
  Eigen::MatrixXd R(n, K);
  for (Eigen::Index j = 0; j < K; ++j) {
    const auto perm = rng.permutation(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) R(i, j) = a(static_cast<Eigen::Index>(perm[i]));
  }

  // Remove the chance correlation of the permuted scores before imposing the
  // target. Skipped when the sample correlation is numerically singular.
  Eigen::MatrixXd centered = R.rowwise() - R.colwise().mean();
  Eigen::MatrixXd cov = centered.transpose() * centered;
  const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
  const Eigen::MatrixXd E = cov.cwiseQuotient(sd * sd.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(E);
  Eigen::MatrixXd Rstar;
  if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 1e-8) {
    const Eigen::MatrixXd Q = llt.matrixL();
    // R Q^{-T}
    const Eigen::MatrixXd white =
        Q.triangularView<Eigen::Lower>().solve(R.transpose()).transpose();
    Rstar = white * P.transpose();
  } else {
    Rstar = R * P.transpose();
  }

  Eigen::MatrixXd out(n, K);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::vector<double> sorted(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < K; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) sorted[static_cast<std::size_t>(i)] = data(i, j);
    std::sort(sorted.begin(), sorted.end());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return Rstar(x, j) < Rstar(y, j); });
    // The row holding the r-th smallest R* entry receives the r-th smallest datum.
    for (std::size_t r = 0; r < order.size(); ++r) out(order[r], j) = sorted[r];
  }
  return out;
}

Eigen::MatrixXd iman_conover_pair(const Eigen::MatrixXd& data, double rho, Rng& rng,
                                  RankTarget target) {
  if (data.cols() != 2) throw ParameterError("iman_conover_pair needs exactly 2 columns");
  Eigen::Matrix2d C;
  C << 1.0, rho, rho, 1.0;
  return iman_conover(data, C, rng, target);
}

}  // namespace active
