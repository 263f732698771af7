#include <cfloat>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "active/error.hpp"
#include "active/normal.hpp"
#include "active/proximal_2sls.hpp"
#include "active/random.hpp"
#include "oracles.hpp"

using namespace active;
using doctest::Approx;

namespace {

PanelData small_panel(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  SemConfig c;
  c.n = static_cast<std::size_t>(n);
  c.d = static_cast<std::size_t>(d);
  c.seed = seed;
  return simulate_sem(c);
}

}  // namespace

TEST_CASE("OLS proxy edge cases") {
  PanelData p = small_panel(50, 1, 3);
  p.y.setConstant(2.5);
  auto fit = ols_proxy(p);
  CHECK(std::abs(fit.psi_hat) < 1e-12);
  CHECK(fit.pvalue == 1.0);

  p.y = Eigen::VectorXd::Ones(p.n()) + 2.0 * p.a;
  fit = ols_proxy(p);
  CHECK(fit.psi_hat == Approx(2.0).epsilon(1e-14));
  CHECK(fit.pvalue == DBL_MIN);
}

TEST_CASE("OLS proxy matches a least squares fit") {
  const PanelData p = small_panel(300, 2, 5);
  Eigen::MatrixXd x(p.n(), 2);
  x.col(0).setOnes();
  x.col(1) = p.a;
  const Eigen::VectorXd b = x.colPivHouseholderQr().solve(p.y);
  const Eigen::VectorXd r = p.y - x * b;
  const double s2 = r.squaredNorm() / static_cast<double>(p.n() - 2);
  const double se = std::sqrt(s2 * (x.transpose() * x).inverse()(1, 1));
  const auto fit = ols_proxy(p);
  CHECK(fit.psi_hat == Approx(b(1)).epsilon(1e-12));
  CHECK(fit.se == Approx(se).epsilon(1e-10));
}

TEST_CASE("OLS proxy is invalid under confounding") {
  int small = 0;
  const int reps = 400;
  for (int s = 0; s < reps; ++s) {
    SemConfig c;
    c.n = 200;
    c.seed = 1000 + s;
    small += ols_proxy(simulate_sem(c)).pvalue <= 0.05;
  }
  CHECK(small > 0.3 * reps);
}

TEST_CASE("two-stage fit on a hand-sized dataset") {
  PanelData p;
  p.y = (Eigen::VectorXd(6) << 1.0, 2.5, 0.3, 4.1, 2.2, 3.3).finished();
  p.a = (Eigen::VectorXd(6) << 0, 1, 0, 1, 0, 1).finished();
  p.z = (Eigen::MatrixXd(6, 1) << 0.2, -1.0, 1.5, 0.7, -0.4, 2.0).finished();
  p.w = (Eigen::MatrixXd(6, 1) << 1.1, 0.4, 2.0, 1.7, -0.2, 2.9).finished();
  const auto fit = tsls_fit(p);

  Eigen::MatrixXd zt(6, 3);
  zt << Eigen::VectorXd::Ones(6), p.a, p.z;
  const Eigen::VectorXd alpha = (zt.transpose() * zt).inverse() * zt.transpose() * p.w.col(0);
  Eigen::MatrixXd x(6, 3);
  x << Eigen::VectorXd::Ones(6), p.a, zt * alpha;
  const Eigen::VectorXd beta = (x.transpose() * x).inverse() * x.transpose() * p.y;
  for (int k = 0; k < 3; ++k) {
    CHECK(fit.alpha_hat(k) == Approx(alpha(k)).epsilon(1e-10));
    CHECK(fit.beta_hat(k) == Approx(beta(k)).epsilon(1e-10));
  }
  CHECK(fit.psi_hat == fit.beta_hat(1));
}

TEST_CASE("noiseless SEM identifies the effect exactly") {
  SemConfig c;
  c.n = 500;
  c.d = 3;
  c.beta_a = 2.0;
  c.noise_y = 0.0;
  c.noise_w = 0.0;
  c.seed = 8;
  CHECK(tsls_fit(simulate_sem(c)).psi_hat == Approx(2.0).epsilon(1e-8));
}

TEST_CASE("first stage without signal is flagged") {
  Rng rng(3);
  PanelData p;
  const Eigen::Index n = 5000;
  p.y.resize(n);
  p.a.resize(n);
  p.z.resize(n, 2);
  p.w.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    p.a(i) = rng.uniform() < 0.5;
    for (int j = 0; j < 2; ++j) {
      p.z(i, j) = rng.normal();
      p.w(i, j) = rng.normal();
    }
    p.y(i) = rng.normal();
  }
  bool flagged = false;
  try {
    flagged = tsls_fit(p).weak_first_stage;
  } catch (const SingularDesignError&) {
    flagged = true;
  }
  CHECK(flagged);
}

TEST_CASE("panel validation") {
  PanelData p = small_panel(50, 2, 1);
  p.y.conservativeResize(6);
  p.a.conservativeResize(6);
  p.z.conservativeResize(6, 2);
  p.w.conservativeResize(6, 2);
  p.a << 0, 1, 0, 1, 0, 1;
  CHECK_THROWS_AS(validate(p), ParameterError);
  PanelData q = small_panel(50, 2, 1);
  q.a.setZero();
  CHECK_THROWS_AS(validate(q), SingularDesignError);
  CHECK_THROWS_AS(ols_proxy(q), SingularDesignError);
  PanelData r = small_panel(50, 2, 1);
  r.z.col(1) = 2.0 * r.z.col(0);
  CHECK_THROWS_AS(tsls_fit(r), SingularDesignError);
}

TEST_CASE("sandwich matches the dense oracle") {
  for (Eigen::Index d = 1; d <= 3; ++d) {
    const PanelData p = small_panel(60 + 20 * d, d, 40 + d);
    const auto fit = tsls_fit(p);
    const Eigen::MatrixXd dense = oracle::dense_sandwich(p, oracle::stacked_theta(fit, d));
    const auto full = sandwich_variance(p, fit, SandwichJacobian::Full);
    REQUIRE(full.covariance.rows() == sandwich_dimension(d));
    const double scale = dense.cwiseAbs().maxCoeff();
    CHECK((full.covariance - dense).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    const Eigen::Index k = beta_a_index(d);
    CHECK(full.se == Approx(std::sqrt(dense(k, k))).epsilon(1e-10));

    // The row equations agree as well.
    const Eigen::MatrixXd psi = estimating_equations(p, fit);
    const Eigen::MatrixXd psi_dense = oracle::row_equations(p, oracle::stacked_theta(fit, d));
    CHECK((psi - psi_dense).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + psi.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("2SLS p-value") {
  CHECK(tsls_pvalue(0.0, 1.0) == 1.0);
  CHECK(tsls_pvalue(1.959964, 1.0) == Approx(0.05).epsilon(1e-5));
  CHECK(tsls_pvalue(-1.959964, 1.0) == Approx(0.05).epsilon(1e-5));
  CHECK(tsls_pvalue(5.0, 0.0) == DBL_MIN);
  CHECK_THROWS_AS(tsls_pvalue(1.0, -1.0), ParameterError);
}

TEST_CASE("active 2SLS") {
  const PanelData p = small_panel(400, 2, 77);
  for (std::uint64_t s = 0; s < 5; ++s) {
    Rng rng(s);
    const auto r = active_2sls(p, 0.0, rng);
    CHECK(r.stat.queried);
    REQUIRE(r.tsls.has_value());
    CHECK(r.stat.value == r.tsls->pvalue);
  }
  // All proxies identical here, so the query rate is a plain Bernoulli mean.
  int queries = 0;
  const int reps = 4000;
  PanelData flat = p;
  flat.y.setConstant(1.0);
  REQUIRE(ols_proxy(flat).pvalue == 1.0);
  for (int s = 0; s < reps; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    queries += active_2sls(flat, 0.999, rng).stat.queried;
  }
  CHECK(queries <= 15);
}

TEST_CASE("without confounding OLS and 2SLS agree") {
  double gap = 0.0;
  const int reps = 50;
  for (int s = 0; s < reps; ++s) {
    SemConfig c;
    c.n = 2000;
    c.confounding = 0.0;
    c.beta_a = 1.0;
    c.seed = 500 + s;
    const auto data = simulate_sem(c);
    gap += (ols_proxy(data).psi_hat - tsls_fit(data).psi_hat) / reps;
  }
  CHECK(std::abs(gap) < 0.05);
}

TEST_CASE("SEM simulation is reproducible") {
  const PanelData a = small_panel(100, 2, 9), b = small_panel(100, 2, 9);
  CHECK(a.y == b.y);
  CHECK(a.z == b.z);
  CHECK_THROWS_AS(small_panel(6, 2, 1), ParameterError);
}
