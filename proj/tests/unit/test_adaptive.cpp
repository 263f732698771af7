#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "doctest.h"

#include "active/adaptive.hpp"
#include "active/error.hpp"
#include "active/random.hpp"

using namespace active;
using doctest::Approx;

TEST_CASE("expected log objective") {
  SUBCASE("proxies at gamma keep the proxy") {
    const MixtureSample s = {{0.5, 10.0}, {0.5, 0.0}};
    CHECK(expected_log_objective(0.5, s) == Approx(std::log(0.5)));
  }
  SUBCASE("huge proxies put all weight on the truth") {
    const MixtureSample s(10, {1e12, std::numbers::e});
    CHECK(expected_log_objective(0.5, s) == Approx(1.0 - std::log(2.0)).epsilon(1e-9));
  }
  SUBCASE("two-point sample") {
    const MixtureSample s = {{2.0, 4.0}, {0.5, 1.0}};
    CHECK(expected_log_objective(0.5, s) == Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("a zero truth with positive query weight is minus infinity") {
    const MixtureSample s = {{2.0, 0.0}};
    CHECK(expected_log_objective(0.5, s) == kLogSentinel);
  }
  CHECK_THROWS_AS(expected_log_objective(0.0, MixtureSample{{1.0, 1.0}}), ParameterError);
}

TEST_CASE("budget usage") {
  CHECK(budget_usage(1.0, MixtureSample{{0.3, 1}, {1.0, 2}}) == 0.0);
  CHECK(budget_usage(0.5, MixtureSample{{2.0, 1}, {2.0, 3}}) == Approx(0.75));
  CHECK(budget_usage(1e-12, MixtureSample{{3.0, 1}}) == Approx(1.0));
}

TEST_CASE("tune gamma") {
  SUBCASE("objective increasing in gamma picks the top of the grid") {
    const MixtureSample s(5, {1e12, std::numbers::e});
    const auto r = tune_gamma(s, 1.0);
    CHECK(r.gamma == 1.0);
    CHECK(r.feasible);
  }
  SUBCASE("zero budget is met only by never querying") {
    const auto ok = tune_gamma(MixtureSample{{0.5, 2}, {0.9, 0.1}}, 0.0);
    CHECK(ok.feasible);
    CHECK(ok.usage == 0.0);
    const auto bad = tune_gamma(MixtureSample{{5.0, 2}}, 0.0);
    CHECK_FALSE(bad.feasible);
    CHECK(bad.gamma == 1.0);
  }
  SUBCASE("the chosen gamma respects the budget and maximizes over the grid") {
    Rng rng(9);
    MixtureSample s;
    for (int i = 0; i < 300; ++i) {
      const double z = rng.normal(1.0, 1.0);
      s.push_back({std::exp(z + 0.3 * rng.normal() - 0.5), std::exp(z - 0.5)});
    }
    const double floor = budget_usage(1.0, s);
    for (double extra : {0.02, 0.2, 0.5}) {
      const double budget = std::min(1.0, floor + extra);
      const auto r = tune_gamma(s, budget, 0.01, 2);
      REQUIRE(r.feasible);
      CHECK(budget_usage(r.gamma, s) <= budget);
      for (double g : gamma_grid(0.01)) {
        if (budget_usage(g, s) <= budget) CHECK(expected_log_objective(g, s) <= r.objective);
      }
    }
  }
  SUBCASE("thread count does not matter") {
    MixtureSample s = {{2.0, 4.0}, {0.5, 1.0}, {7.0, 0.2}};
    const auto a = tune_gamma(s, 0.5, 0.01, 1);
    const auto b = tune_gamma(s, 0.5, 0.01, 4);
    CHECK(a.gamma == b.gamma);
    CHECK(a.objective == b.objective);
  }
}

TEST_CASE("gamma grid") {
  const auto g = gamma_grid(0.25);
  CHECK(g == std::vector<double>{0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("p-value pairs become reciprocal e-value pairs") {
  const auto s = from_pvalue_pairs({{0.5, 0.25}});
  CHECK(s[0].proxy == 2.0);
  CHECK(s[0].truth == 4.0);
}

TEST_CASE("eta for a budget") {
  CHECK(eta_for_budget(0.8, 0.2) == Approx(1.0));
  CHECK(eta_for_budget(1.0, 0.3) == 0.0);
  CHECK(eta_for_budget(0.9, 0.1876) == Approx(0.533).epsilon(1e-3));
  CHECK_THROWS_AS(eta_for_budget(0.5, 0.2), ParameterError);
  for (double ell : {0.05, 0.2, 0.7}) {
    for (double b = 1.0 - ell; b <= 1.0; b += 0.05) {
      const double eta = eta_for_budget(b, ell);
      CHECK(1.0 - eta * ell <= b + 1e-12);
    }
  }
}

TEST_CASE("multilevel e-values reduce to the plain construction") {
  const std::vector<double> f = {0.3, 2.0, 5.0, 1.2};
  std::vector<IterateGenerator> gens;
  for (double v : f) gens.push_back([v]() -> std::optional<double> { return v; });
  std::vector<TrueStatOracle> oracles;
  for (int i = 0; i < 4; ++i) oracles.push_back(TrueStatOracle::constant(3.0));
  const auto r = multilevel_active_evalues(gens, stop_after(1), oracles, 0.5, 42);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto o = TrueStatOracle::constant(3.0);
    Rng rng = hypothesis_rng(42, i);
    const auto plain = active_evalue(f[i], o, 0.5, rng);
    CHECK(r.stats[i].value == plain.value);
    CHECK(r.stats[i].queried == plain.queried);
    CHECK(r.stop_times[i] == 1);
  }
}

TEST_CASE("multilevel freezes the stopped iterate") {
  double next = 0.0;
  std::vector<IterateGenerator> gens = {[&next]() -> std::optional<double> { return next += 1.0; }};
  // stop at the third (largest) iterate
  StoppingRule at_max{[](std::size_t, const std::vector<std::vector<double>>& h) { return h[0].size() == 3; }};
  std::vector<TrueStatOracle> oracles = {TrueStatOracle::constant(4.0)};
  // a seed whose first draw queries at probability 1 - 0.5 / 3
  std::uint64_t seed = 0;
  while (hypothesis_rng(seed, 0).uniform() >= 1.0 - 0.5 / 3.0) ++seed;
  const auto r = multilevel_active_evalues(gens, at_max, oracles, 0.5, seed);
  CHECK(r.frozen_proxies[0] == 3.0);
  CHECK(r.stop_times[0] == 3);
  CHECK(r.stats[0].queried);
  CHECK(r.stats[0].value == Approx(2.0));
}

TEST_CASE("multilevel errors") {
  std::vector<IterateGenerator> gens = {[]() -> std::optional<double> { return std::nullopt; }};
  std::vector<TrueStatOracle> oracles(1);
  CHECK_THROWS_AS(multilevel_active_evalues(gens, stop_after(2), oracles, 0.5, 1), ConfigurationError);
  std::vector<IterateGenerator> forever = {[]() -> std::optional<double> { return 0.1; }};
  StoppingRule never{[](std::size_t, const std::vector<std::vector<double>>&) { return false; }};
  const auto r = multilevel_active_evalues(forever, never, oracles, 0.5, 1, 7);
  CHECK(r.stop_times[0] == 7);
}

TEST_CASE("interactive e-values with the identity update match batch") {
  const std::vector<double> f = {0.4, 3.0, 1.5, 9.0, 2.2};
  std::vector<TrueStatOracle> oracles;
  for (double e : {1.0, 2.0, 0.5, 6.0, 0.0}) oracles.push_back(TrueStatOracle::constant(e));
  const auto r = interactive_active_evalues(make_evalues(f), in_order({4, 2, 0, 1, 3}), identity_update(),
                                            oracles, 0.4, 13);
  CHECK(r.order == std::vector<std::size_t>{4, 2, 0, 1, 3});
  const std::vector<double> e = {1.0, 2.0, 0.5, 6.0, 0.0};
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto o = TrueStatOracle::constant(e[i]);
    Rng rng = hypothesis_rng(13, i);
    CHECK(r.stats[i].value == active_evalue(f[i], o, 0.4, rng).value);
  }
}

TEST_CASE("interactive update sees revealed values") {
  // Doubles the remaining proxies after a query that revealed E > 1.
  const UpdateRule doubler = [](const std::vector<double>& proxies, const std::vector<bool>& processed,
                                const std::vector<bool>& queried, const std::vector<double>& revealed) {
    auto out = proxies;
    bool boost = false;
    for (std::size_t j = 0; j < proxies.size(); ++j) boost |= processed[j] && queried[j] && revealed[j] > 1.0;
    if (boost) {
      for (std::size_t j = 0; j < proxies.size(); ++j) {
        if (!processed[j]) out[j] *= 2.0;
      }
    }
    return out;
  };
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    std::vector<TrueStatOracle> oracles = {TrueStatOracle::constant(5.0), TrueStatOracle::constant(1.0)};
    const auto r = interactive_active_evalues(make_evalues({2.0, 1.5}), in_order({0, 1}), doubler, oracles,
                                              0.5, seed);
    const double expected = r.stats[0].queried ? 3.0 : 1.5;
    CHECK(r.used_proxies[1] == expected);
  }
}

TEST_CASE("interactive misconfiguration") {
  std::vector<TrueStatOracle> oracles = {TrueStatOracle::constant(1.0), TrueStatOracle::constant(1.0)};
  const Chooser same = [](const std::vector<double>&, const std::vector<bool>&) { return std::size_t{0}; };
  CHECK_THROWS_AS(interactive_active_evalues(make_evalues({1, 1}), same, identity_update(), oracles, 0.5, 1),
                  ConfigurationError);
  const UpdateRule meddle = [](const std::vector<double>& p, const std::vector<bool>&, const std::vector<bool>&,
                               const std::vector<double>&) {
    auto out = p;
    out[0] += 1.0;
    return out;
  };
  CHECK_THROWS_AS(interactive_active_evalues(make_evalues({1, 1}), in_order({0, 1}), meddle, oracles, 0.5, 1),
                  ConfigurationError);
}
