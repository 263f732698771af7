#pragma once

// Proximal causal inference test for a treatment effect: a fast but biased
// OLS proxy p-value, and a two-stage least squares estimate using negative
// control exposures Z and outcomes W with a stacked-estimating-equation
// sandwich standard error.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "active/active_core.hpp"
#include "active/random.hpp"

namespace active {

struct PanelData {
  Eigen::VectorXd y;  // outcome
  Eigen::VectorXd a;  // treatment in {0, 1}
  Eigen::MatrixXd z;  // n x d negative control exposures
  Eigen::MatrixXd w;  // n x d negative control outcomes

  Eigen::Index n() const { return y.size(); }
  Eigen::Index d() const { return z.cols(); }
};

// Throws ParameterError on inconsistent shapes, n <= 2d + 2, non-binary A,
// or a single treatment level.
void validate(const PanelData& data);

struct OlsFit {
  double psi_hat = 0.0;
  double se = 0.0;
  double pvalue = 1.0;
};

// Regression of Y on [1, A] with the classical SE and a t(n - 2) p-value.
// Runs in O(n).
OlsFit ols_proxy(const PanelData& data);

struct TslsFit {
  // Stage-one coefficients stacked per W column: [a_j0, a_ja, a_jz (d)].
  Eigen::VectorXd alpha_hat;
  // [b_0, b_a, b_s (d)]
  Eigen::VectorXd beta_hat;
  double psi_hat = 0.0;
  Eigen::MatrixXd fitted_s;  // n x d first-stage fitted values
  // Partial F statistic of Z in each first-stage regression.
  std::vector<double> first_stage_f;
  // Some first-stage partial F is below 10: Z barely predicts W, and the
  // second stage is close to collinear.
  bool weak_first_stage = false;
};

TslsFit tsls_fit(const PanelData& data);

// Which Jacobian enters the sandwich. BlockDiagonal keeps one block per
// estimating equation and treats the fitted S as fixed. Full adds the
// derivative of the second-stage equations with respect to the first-stage
// coefficients, which S depends on.
enum class SandwichJacobian { BlockDiagonal, Full };

// Parameter vector layout: alpha_1, ..., alpha_d, beta, each of length d + 2.
inline Eigen::Index sandwich_dimension(Eigen::Index d) { return (d + 1) * (d + 2); }
inline Eigen::Index beta_a_index(Eigen::Index d) { return d * (d + 2) + 1; }

// n x D matrix whose row i is Psi(O_i; alpha_hat, beta_hat).
Eigen::MatrixXd estimating_equations(const PanelData& data, const TslsFit& fit);

struct SandwichResult {
  Eigen::MatrixXd covariance;  // A^{-1} B A^{-T} / n, the covariance of the estimates
  double se = 0.0;             // sqrt of the beta_a entry
};

// Inverts A block by block (block lower triangular for Full).
SandwichResult sandwich_variance(const PanelData& data, const TslsFit& fit,
                                 SandwichJacobian jacobian = SandwichJacobian::Full);

// 2 Phi(-|psi| / sigma); 1 when psi = 0, floored at the smallest positive
// double otherwise.
double tsls_pvalue(double psi_hat, double sigma);

struct TslsTest {
  TslsFit fit;
  double se = 0.0;
  double pvalue = 1.0;
};

TslsTest tsls_test(const PanelData& data, SandwichJacobian jacobian = SandwichJacobian::Full);

struct Active2slsResult {
  ActiveStat stat;
  OlsFit ols;
  std::optional<TslsTest> tsls;  // set iff queried
  double elapsed_proxy_s = 0.0;
  double elapsed_true_s = 0.0;
};

// OLS proxy, T ~ Bern(1 - gamma Q), and the 2SLS test only when T = 1.
Active2slsResult active_2sls(const PanelData& data, double gamma, Rng& rng,
                             SandwichJacobian jacobian = SandwichJacobian::Full);

// Linear SEM with one latent confounder per negative-control pair:
//   U ~ N(0, I_d), Z_j = z_loading U_j + noise_z e,
//   A ~ Bern(logistic(treat_intercept + confounding sum(U)/sqrt(d) + z_to_a sum(Z)/sqrt(d))),
//   W_j = alpha_0 + alpha_u U_j + noise_w e,
//   Y = beta_0 + beta_a A + beta_u sum(U) + noise_y e.
struct SemConfig {
  std::size_t n = 2000;
  std::size_t d = 2;
  double beta_0 = 0.0;
  double beta_a = 0.0;
  double beta_u = 1.0;
  double alpha_0 = 0.0;
  double alpha_u = 1.0;
  double z_loading = 1.0;
  double confounding = 1.0;
  double z_to_a = 0.0;
  double treat_intercept = 0.0;
  double noise_y = 1.0;
  double noise_w = 1.0;
  double noise_z = 1.0;
  std::uint64_t seed = 0;
};

PanelData simulate_sem(const SemConfig& config);

}  // namespace active
