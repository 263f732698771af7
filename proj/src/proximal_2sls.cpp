#include "active/proximal_2sls.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "active/error.hpp"
#include "active/normal.hpp"

namespace active {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kTiny = std::numeric_limits<double>::min();
constexpr double kEps = std::numeric_limits<double>::epsilon();

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::MatrixXd with_intercept_and_treatment(const Eigen::VectorXd& a, const Eigen::MatrixXd& rest) {
  const Eigen::Index n = a.size();
  Eigen::MatrixXd m(n, rest.cols() + 2);
  m.col(0).setOnes();
  m.col(1) = a;
  m.rightCols(rest.cols()) = rest;
  return m;
}

// Residual sum of squares of v regressed on [1, A]; the fit is the group mean.
double two_group_rss(const Eigen::VectorXd& v, const Eigen::VectorXd& a) {
  double s1 = 0.0, s0 = 0.0, n1 = 0.0, n0 = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (a(i) == 1.0) {
      s1 += v(i);
      n1 += 1.0;
    } else {
      s0 += v(i);
      n0 += 1.0;
    }
  }
  const double m1 = s1 / n1, m0 = s0 / n0;
  double rss = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double r = v(i) - (a(i) == 1.0 ? m1 : m0);
    rss += r * r;
  }
  return rss;
}

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& block, const char* name) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
  if (!lu.isInvertible()) {
    throw SingularDesignError(std::string("sandwich variance: ") + name + " Jacobian block is singular");
  }
  return lu.inverse();
}

}  // namespace

void validate(const PanelData& data) {
  const Eigen::Index n = data.n(), d = data.d();
  if (d < 1) throw ParameterError("need at least one negative control pair (d >= 1)");
  if (data.a.size() != n || data.z.rows() != n || data.w.rows() != n) {
    throw ParameterError("Y, A, Z, W must have the same number of rows");
  }
  if (data.w.cols() != d) {
    throw ParameterError("Z and W must have the same number of columns, got " +
                         std::to_string(d) + " and " + std::to_string(data.w.cols()));
  }
  if (n <= 2 * d + 2) {
    throw ParameterError("need n > 2d + 2 samples, got n = " + std::to_string(n) +
                         " with d = " + std::to_string(d));
  }
  Eigen::Index treated = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (data.a(i) != 0.0 && data.a(i) != 1.0) throw ParameterError("treatment A must be 0 or 1");
    treated += data.a(i) == 1.0;
  }
  if (treated == 0 || treated == n) {
    throw SingularDesignError("treatment A is constant; [1, A] is singular");
  }
  if (!data.y.allFinite() || !data.z.allFinite() || !data.w.allFinite()) {
    throw ParameterError("panel data contains non-finite values");
  }
}

OlsFit ols_proxy(const PanelData& data) {
  validate(data);
  const Eigen::Index n = data.n();
  double s1 = 0.0, s0 = 0.0, n1 = 0.0, n0 = 0.0, scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    scale = std::max(scale, std::abs(data.y(i)));
    if (data.a(i) == 1.0) {
      s1 += data.y(i);
      n1 += 1.0;
    } else {
      s0 += data.y(i);
      n0 += 1.0;
    }
  }
  OlsFit fit;
  fit.psi_hat = s1 / n1 - s0 / n0;
  const double sigma2 = two_group_rss(data.y, data.a) / static_cast<double>(n - 2);
  // (M^T M)^{-1}_{AA} = 1/n1 + 1/n0 for M = [1, A]
  fit.se = std::max(std::sqrt(sigma2 * (1.0 / n1 + 1.0 / n0)), kTiny);
  if (std::abs(fit.psi_hat) <= 16.0 * kEps * scale) {
    // group means agree to rounding
    fit.pvalue = 1.0;
  } else {
    const double t = std::abs(fit.psi_hat) / fit.se;
    fit.pvalue = std::clamp(2.0 * student_t_cdf(-t, static_cast<double>(n - 2)), kTiny, 1.0);
  }
  return fit;
}

TslsFit tsls_fit(const PanelData& data) {
  validate(data);
  const Eigen::Index n = data.n(), d = data.d(), p = d + 2;

  const Eigen::MatrixXd zt = with_intercept_and_treatment(data.a, data.z);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr1(zt);
  if (qr1.rank() < p) {
    throw SingularDesignError("first stage: design [1, A, Z] is rank deficient (rank " +
                              std::to_string(qr1.rank()) + " of " + std::to_string(p) + ")");
  }
  const Eigen::MatrixXd alpha = qr1.solve(data.w);  // p x d

  TslsFit fit;
  fit.fitted_s = zt * alpha;
  fit.alpha_hat.resize(d * p);
  for (Eigen::Index j = 0; j < d; ++j) fit.alpha_hat.segment(j * p, p) = alpha.col(j);

  fit.first_stage_f.resize(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    const double rss_full = (data.w.col(j) - fit.fitted_s.col(j)).squaredNorm();
    const double rss_restricted = two_group_rss(data.w.col(j), data.a);
    const double num = std::max(rss_restricted - rss_full, 0.0) / static_cast<double>(d);
    const double den = rss_full / static_cast<double>(n - p);
    fit.first_stage_f[static_cast<std::size_t>(j)] =
        den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
  }
  fit.weak_first_stage =
      *std::min_element(fit.first_stage_f.begin(), fit.first_stage_f.end()) < 10.0;

  const Eigen::MatrixXd x = with_intercept_and_treatment(data.a, fit.fitted_s);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr2(x);
  if (qr2.rank() < p) {
    throw SingularDesignError("second stage: design [1, A, S] is rank deficient (rank " +
                              std::to_string(qr2.rank()) + " of " + std::to_string(p) +
                              "); Z may not predict W");
  }
  fit.beta_hat = qr2.solve(data.y);
  fit.psi_hat = fit.beta_hat(1);
  return fit;
}

Eigen::MatrixXd estimating_equations(const PanelData& data, const TslsFit& fit) {
  const Eigen::Index n = data.n(), d = data.d(), p = d + 2;
  const Eigen::MatrixXd zt = with_intercept_and_treatment(data.a, data.z);
  const Eigen::MatrixXd x = with_intercept_and_treatment(data.a, fit.fitted_s);
  const Eigen::VectorXd r = data.y - x * fit.beta_hat;

  Eigen::MatrixXd psi(n, sandwich_dimension(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    const Eigen::VectorXd rj = data.w.col(j) - fit.fitted_s.col(j);
    psi.middleCols(j * p, p) = zt.array().colwise() * rj.array();
  }
  psi.rightCols(p) = x.array().colwise() * r.array();
  return psi;
}

SandwichResult sandwich_variance(const PanelData& data, const TslsFit& fit,
                                 SandwichJacobian jacobian) {
  const Eigen::Index n = data.n(), d = data.d(), p = d + 2, D = sandwich_dimension(d);
  const double nd = static_cast<double>(n);
  const Eigen::MatrixXd zt = with_intercept_and_treatment(data.a, data.z);
  const Eigen::MatrixXd x = with_intercept_and_treatment(data.a, fit.fitted_s);

  // Every first-stage equation shares the Jacobian block -Zt^T Zt / n.
  const Eigen::MatrixXd a11 = -(zt.transpose() * zt) / nd;
  const Eigen::MatrixXd a22 = -(x.transpose() * x) / nd;
  const Eigen::MatrixXd a11_inv = checked_inverse(a11, "first-stage");
  const Eigen::MatrixXd a22_inv = checked_inverse(a22, "second-stage");

  Eigen::MatrixXd a_inv = Eigen::MatrixXd::Zero(D, D);
  for (Eigen::Index j = 0; j < d; ++j) a_inv.block(j * p, j * p, p, p) = a11_inv;
  a_inv.bottomRightCorner(p, p) = a22_inv;

  if (jacobian == SandwichJacobian::Full) {
    // d Psi_2 / d alpha_j = e_{j+2} r Zt_i^T - beta_{s,j} x_i Zt_i^T, averaged.
    const Eigen::VectorXd r = data.y - x * fit.beta_hat;
    const Eigen::RowVectorXd rz = (zt.array().colwise() * r.array()).colwise().sum() / nd;
    const Eigen::MatrixXd xz = (x.transpose() * zt) / nd;
    for (Eigen::Index j = 0; j < d; ++j) {
      Eigen::MatrixXd a21 = -fit.beta_hat(2 + j) * xz;
      a21.row(2 + j) += rz;
      a_inv.block(d * p, j * p, p, p) = -a22_inv * a21 * a11_inv;
    }
  }

  const Eigen::MatrixXd psi = estimating_equations(data, fit);
  const Eigen::MatrixXd b = (psi.transpose() * psi) / nd;
  SandwichResult out;
  out.covariance = (a_inv * b * a_inv.transpose()) / nd;
  const double var = out.covariance(beta_a_index(d), beta_a_index(d));
  out.se = std::max(std::sqrt(std::max(var, 0.0)), kTiny);
  return out;
}

double tsls_pvalue(double psi_hat, double sigma) {
  if (!(sigma >= 0.0)) throw ParameterError("standard error must be nonnegative");
  if (psi_hat == 0.0) return 1.0;
  const double t = std::abs(psi_hat) / std::max(sigma, kTiny);
  return std::clamp(2.0 * normal_cdf(-t), kTiny, 1.0);
}

TslsTest tsls_test(const PanelData& data, SandwichJacobian jacobian) {
  TslsTest out;
  out.fit = tsls_fit(data);
  out.se = sandwich_variance(data, out.fit, jacobian).se;
  out.pvalue = tsls_pvalue(out.fit.psi_hat, out.se);
  return out;
}

Active2slsResult active_2sls(const PanelData& data, double gamma, Rng& rng,
                             SandwichJacobian jacobian) {
  Active2slsResult out;
  const auto t0 = Clock::now();
  out.ols = ols_proxy(data);
  out.elapsed_proxy_s = seconds_since(t0);

  TrueStatOracle oracle([&] {
    const auto t1 = Clock::now();
    out.tsls = tsls_test(data, jacobian);
    out.elapsed_true_s = seconds_since(t1);
    return out.tsls->pvalue;
  });
  out.stat = active_pvalue_arbdep(out.ols.pvalue, oracle, gamma, rng);
  return out;
}

PanelData simulate_sem(const SemConfig& c) {
  if (c.d < 1) throw ParameterError("SEM needs d >= 1");
  if (c.n <= 2 * c.d + 2) {
    throw ParameterError("SEM needs n > 2d + 2, got n = " + std::to_string(c.n) +
                         " with d = " + std::to_string(c.d));
  }
  const auto n = static_cast<Eigen::Index>(c.n), d = static_cast<Eigen::Index>(c.d);
  const double root_d = std::sqrt(static_cast<double>(c.d));
  PanelData data;
  data.y.resize(n);
  data.a.resize(n);
  data.z.resize(n, d);
  data.w.resize(n, d);

  Rng rng(c.seed);
  std::vector<double> u(c.d);
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum_u = 0.0, sum_z = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      u[static_cast<std::size_t>(j)] = rng.normal();
      sum_u += u[static_cast<std::size_t>(j)];
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      data.z(i, j) = c.z_loading * u[static_cast<std::size_t>(j)] + c.noise_z * rng.normal();
      sum_z += data.z(i, j);
    }
    const double logit = c.treat_intercept + c.confounding * sum_u / root_d + c.z_to_a * sum_z / root_d;
    data.a(i) = rng.uniform() < 1.0 / (1.0 + std::exp(-logit)) ? 1.0 : 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      data.w(i, j) = c.alpha_0 + c.alpha_u * u[static_cast<std::size_t>(j)] + c.noise_w * rng.normal();
    }
    data.y(i) = c.beta_0 + c.beta_a * data.a(i) + c.beta_u * sum_u + c.noise_y * rng.normal();
  }
  return data;
}

}  // namespace active
