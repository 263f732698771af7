#include <cmath>
#include <vector>

#include "doctest.h"

#include "active/error.hpp"
#include "active/io.hpp"
#include "active/metrics.hpp"
#include "active/sim_harness.hpp"

using namespace active;

TEST_CASE("Gaussian pairs") {
  GaussianSimConfig c;
  SUBCASE("independent null truths are uniform") {
    c.rho = 0.0;
    Rng rng(1);
    std::vector<double> p(5000);
    for (auto& v : p) v = simulate_gaussian_pair(c, true, rng).p;
    CHECK(ks_uniform(p) < ks_band(p.size()));
  }
  SUBCASE("strong correlation") {
    c.rho = 0.999;
    c.mu = 1.0;
    Rng rng(2);
    std::vector<double> q(5000), p(5000);
    for (std::size_t i = 0; i < q.size(); ++i) {
      const auto g = simulate_gaussian_pair(c, false, rng);
      q[i] = g.q;
      p[i] = g.p;
    }
    CHECK(spearman_rho(q, p) > 0.95);
  }
  SUBCASE("the null proxy is anti-conservative") {
    Rng rng(3);
    std::vector<double> q(5000);
    for (auto& v : q) v = simulate_gaussian_pair(c, true, rng).q;
    CHECK(max_excess_over_uniform(q, uniform_grid(100)) > 0.05);
  }
  c.rho = 1.0;
  Rng rng(0);
  CHECK_THROWS_AS(simulate_gaussian_pair(c, true, rng), ParameterError);
}

TEST_CASE("study reports are identical across thread counts") {
  GaussianSimConfig g;
  const auto a = io::dump(io::to_json(run_gaussian_study(g, 300, 5, 1)));
  const auto b = io::dump(io::to_json(run_gaussian_study(g, 300, 5, 4)));
  CHECK(a == b);

  BetaSimConfig bc;
  bc.K = 400;
  const auto c = io::dump(io::to_json(run_beta_study(bc, 3, 5, 1)));
  const auto d = io::dump(io::to_json(run_beta_study(bc, 3, 5, 4)));
  CHECK(c == d);

  FdrScenario s;
  const auto e = run_fdr_study(ProcedureId::ActiveBH, s, 50, 0.1, 3, 1);
  const auto f = run_fdr_study(ProcedureId::ActiveBH, s, 50, 0.1, 3, 4);
  CHECK(e.fdr == f.fdr);
  CHECK(e.power == f.power);
  CHECK(e.query_fraction == f.query_fraction);
}

TEST_CASE("Beta study at zero correlation") {
  BetaSimConfig c;
  const auto r = run_beta_study(c, 5, 11, 1);
  const auto& null_known = r.find("ind-known", "null");
  CHECK(null_known.reject_rate <= 0.05 + 2 * null_known.reject_se);
  CHECK(null_known.ks < ks_band(null_known.samples) * 1.5);
  // power of the active method lies between the proxy and the truth here
  const double active = r.find("ind-known", "alternative").reject_rate;
  const double proxy = r.find("proxy", "alternative").reject_rate;
  const double truth = r.find("true", "alternative").reject_rate;
  CHECK(active >= std::min(proxy, truth));
  CHECK(active <= std::max(proxy, truth));
}

TEST_CASE("empty selection never rejects") {
  FdrScenario s;
  s.pi1 = 0.0;
  s.select_m = 0;
  const auto r = run_fdr_study(ProcedureId::PF, s, 100, 0.1, 1, 1);
  CHECK(r.fdr == 0.0);
  CHECK(r.query_fraction == 0.0);
}

TEST_CASE("procedure and dependence names round-trip") {
  for (auto p : {ProcedureId::BH, ProcedureId::EBH, ProcedureId::ActiveBH, ProcedureId::ActiveEBH, ProcedureId::PF,
                 ProcedureId::EPF}) {
    CHECK(parse_procedure(to_string(p)) == p);
  }
  for (auto d : {ScenarioDependence::Independent, ScenarioDependence::PRDN, ScenarioDependence::WNDN,
                 ScenarioDependence::Arbitrary}) {
    CHECK(parse_dependence(to_string(d)) == d);
  }
  CHECK_THROWS_AS(parse_procedure("holm"), ParameterError);
}

TEST_CASE("SEM batches") {
  SemConfig c;
  c.n = 200;
  const auto a = simulate_sem_batch(c, 6, 2, 1);
  const auto b = simulate_sem_batch(c, 6, 2, 4);
  REQUIRE(a.size() == 6);
  for (std::size_t h = 0; h < a.size(); ++h) {
    CHECK(a[h].y == b[h].y);
    CHECK(a[h].w == b[h].w);
  }
  CHECK(a[0].y != a[1].y);
  const auto r1 = run_active_2sls_batch(a, 0.5, 9, SandwichJacobian::Full, 1);
  const auto r4 = run_active_2sls_batch(a, 0.5, 9, SandwichJacobian::Full, 4);
  for (std::size_t h = 0; h < a.size(); ++h) {
    CHECK(r1[h].stat.value == r4[h].stat.value);
    CHECK(r1[h].stat.queried == r4[h].stat.queried);
  }
}
