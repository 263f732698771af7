#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "doctest.h"

#include "active/error.hpp"
#include "active/iman_conover.hpp"
#include "active/metrics.hpp"
#include "active/normal.hpp"
#include "active/random.hpp"

using namespace active;
using doctest::Approx;

TEST_CASE("normal distribution against Boost") {
  const boost::math::normal_distribution<double> n01;
  for (double x : {-37.0, -8.0, -3.0, -1.0, -0.1, 0.0, 0.4, 1.5, 6.0}) {
    CHECK(normal_cdf(x) == Approx(boost::math::cdf(n01, x)).epsilon(1e-14));
    CHECK(normal_sf(x) == Approx(boost::math::cdf(boost::math::complement(n01, x))).epsilon(1e-14));
    CHECK(normal_pdf(x) == Approx(boost::math::pdf(n01, x)).epsilon(1e-14));
  }
  for (double p : {1e-300, 1e-20, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.975, 1 - 1e-10}) {
    CHECK(normal_quantile(p) == Approx(boost::math::quantile(n01, p)).epsilon(1e-13));
  }
  CHECK(normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-14));
  CHECK(std::isinf(normal_quantile(0.0)));
  CHECK(student_t_cdf(0.0, 5.0) == Approx(0.5));
}

TEST_CASE("KS statistic and grids") {
  const std::size_t n = 50;
  std::vector<double> mid(n);
  for (std::size_t i = 0; i < n; ++i) mid[i] = (i + 0.5) / n;
  CHECK(ks_uniform(mid) == Approx(1.0 / (2 * n)));
  CHECK(ks_band(10000) == Approx(0.0136));
  CHECK(uniform_grid(4) == std::vector<double>{0.25, 0.5, 0.75, 1.0});
  const auto e = empirical_cdf({0.1, 0.2, 0.2, 0.9}, {0.2, 0.5, 1.0});
  CHECK(e == std::vector<double>{0.75, 0.75, 1.0});
  CHECK(max_excess_over_uniform({0.1, 0.2, 0.2, 0.9}, {0.2, 0.5, 1.0}) == Approx(0.55));
}

TEST_CASE("summary statistics") {
  CHECK(mean({1, 2, 3, 4}) == 2.5);
  CHECK(standard_error({1, 1, 1}) == 0.0);
  CHECK(binomial_se(0.5, 100) == Approx(0.05));
  std::vector<double> many(1000001, 0.1);
  CHECK(pairwise_sum(many) == Approx(100000.1).epsilon(1e-14));
}

TEST_CASE("rank correlation") {
  const std::vector<double> x = {3, 1, 4, 1, 5, 9, 2, 6};
  std::vector<double> r(x.rbegin(), x.rend());
  CHECK(spearman_rho(x, x) == Approx(1.0));
  std::vector<double> neg(x.size());
  std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
  CHECK(spearman_rho(x, neg) == Approx(-1.0));
  CHECK(midranks({10, 20, 20, 30}) == std::vector<double>{1, 2.5, 2.5, 4});
  CHECK(pearson({1, 2, 3}, {2, 4, 6}) == Approx(1.0));
}

TEST_CASE("semidefinite Cholesky") {
  Eigen::Matrix2d one;
  one << 1, 1, 1, 1;
  const Eigen::MatrixXd L = psd_cholesky(one);
  CHECK((L * L.transpose() - one).norm() < 1e-12);
  Eigen::Matrix2d bad;
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(psd_cholesky(bad), DomainError);
}

TEST_CASE("Iman-Conover preserves marginals and hits targets") {
  Rng rng(31);
  const Eigen::Index n = 10000;
  Eigen::MatrixXd data(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    data(i, 0) = rng.beta(0.5, 1.0);
    data(i, 1) = rng.uniform();
  }
  auto col = [](const Eigen::MatrixXd& m, Eigen::Index j) {
    std::vector<double> v(m.col(j).data(), m.col(j).data() + m.rows());
    return v;
  };
  SUBCASE("identity target") {
    const auto out = iman_conover_pair(data, 0.0, rng);
    CHECK(std::abs(spearman_rho(col(out, 0), col(out, 1))) < 3.0 / std::sqrt(double(n)));
  }
  SUBCASE("comonotone target") {
    const auto out = iman_conover_pair(data, 1.0, rng);
    CHECK(spearman_rho(col(out, 0), col(out, 1)) > 0.99);
  }
  SUBCASE("rho 0.5 and exact marginals") {
    const auto out = iman_conover_pair(data, 0.5, rng);
    const double rho = spearman_rho(col(out, 0), col(out, 1));
    CHECK(rho >= 0.48);
    CHECK(rho <= 0.52);
    for (Eigen::Index j = 0; j < 2; ++j) {
      auto a = col(data, j), b = col(out, j);
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      CHECK(a == b);
    }
  }
  CHECK_THROWS_AS(iman_conover_pair(data, 1.5, rng), ParameterError);
}

TEST_CASE("three-column Iman-Conover") {
  Rng rng(5);
  const Eigen::Index n = 10000;
  Eigen::MatrixXd data(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) data(i, j) = rng.normal();
  }
  Eigen::Matrix3d target;
  target << 1, 0.3, 0.6, 0.3, 1, 0.2, 0.6, 0.2, 1;
  const auto out = iman_conover(data, target, rng);
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      std::vector<double> x(out.col(a).data(), out.col(a).data() + n);
      std::vector<double> y(out.col(b).data(), out.col(b).data() + n);
      CHECK(std::abs(spearman_rho(x, y) - target(a, b)) < 0.02);
    }
  }
}

TEST_CASE("random streams") {
  Rng a(derive_seed(7, 3)), b(derive_seed(7, 3)), c(derive_seed(7, 4));
  CHECK(a.bits() == b.bits());
  CHECK(a.bits() != c.bits());
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  Rng r(1);
  const auto perm = r.permutation(20);
  std::vector<std::size_t> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 20; ++i) CHECK(sorted[i] == i);
  double s = 0.0;
  for (int i = 0; i < 20000; ++i) s += r.beta(2.0, 5.0);
  CHECK(s / 20000 == Approx(2.0 / 7.0).epsilon(0.01));
}
