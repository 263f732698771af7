#include "active/sim_harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "active/active_core.hpp"
#include "active/error.hpp"
#include "active/metrics.hpp"
#include "active/mt_procedures.hpp"
#include "active/normal.hpp"
#include "active/parallel.hpp"

namespace active {

namespace {

double rate_at_or_below(const std::vector<double>& v, double level) {
  std::size_t c = 0;
  for (double x : v) c += x <= level;
  return static_cast<double>(c) / static_cast<double>(v.size());
}

template <class T>
std::vector<double> column(const std::vector<T>& rows, double T::*field) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.*field);
  return out;
}

void check_rho(double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw ParameterError("rho must lie in [-1, 1]");
}

}  // namespace

const MethodSummary& TrialReport::find(const std::string& method, const std::string& condition) const {
  for (const auto& m : methods) {
    if (m.method == method && m.condition == condition) return m;
  }
  throw std::out_of_range("report has no method " + method + " under " + condition);
}

MethodSummary summarize(std::string method, std::string condition, const std::vector<double>& values,
                        const std::vector<double>& grid, double level,
                        const std::vector<double>& queries) {
  MethodSummary s;
  s.method = std::move(method);
  s.condition = std::move(condition);
  s.samples = values.size();
  s.ecdf = empirical_cdf(values, grid);
  s.ks = ks_uniform(values);
  s.max_excess = -1.0;
  for (std::size_t k = 0; k < grid.size(); ++k) s.max_excess = std::max(s.max_excess, s.ecdf[k] - grid[k]);
  s.reject_rate = rate_at_or_below(values, level);
  s.reject_se = binomial_se(s.reject_rate, values.size());
  if (!queries.empty()) {
    s.has_queries = true;
    s.query_freq = mean(queries);
    s.query_se = binomial_se(s.query_freq, queries.size());
  }
  return s;
}

// ---- Gaussian study ----

GaussianPair simulate_gaussian_pair(const GaussianSimConfig& c, bool is_null, Rng& rng) {
  if (!(c.rho >= 0.0 && c.rho < 1.0)) throw ParameterError("rho must lie in [0, 1)");
  const double mean_x = is_null ? c.mu_x0 : c.mu;
  const double mean_z = is_null ? 0.0 : c.rho * c.mu;
  const double g1 = rng.normal();
  const double g2 = rng.normal();
  const double x = mean_x + g1;
  const double z = mean_z + c.rho * g1 + std::sqrt(1.0 - c.rho * c.rho) * g2;
  return {normal_sf(x), normal_sf(z)};
}

TrialReport run_gaussian_study(const GaussianSimConfig& c, std::size_t n_trials, std::uint64_t seed,
                               unsigned threads) {
  if (n_trials == 0) throw ParameterError("need at least one trial");
  const NullDensity density = gaussian_null_density(c.mu_x0, c.density_form, c.margin);

  struct Row {
    double proxy, truth, ind, arb, ind_q, arb_q;
  };
  std::vector<Row> null_rows(n_trials), alt_rows(n_trials);
  parallel_for(n_trials, threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    auto run = [&](bool is_null) {
      const GaussianPair pr = simulate_gaussian_pair(c, is_null, rng);
      TrueStatOracle o1 = TrueStatOracle::constant(pr.p);
      TrueStatOracle o2 = TrueStatOracle::constant(pr.p);
      const ActiveStat ind = active_pvalue_density(pr.q, o1, density, c.eta, rng);
      const ActiveStat arb = active_pvalue_arbdep(pr.q, o2, c.gamma, rng);
      return Row{pr.q, pr.p, ind.value, arb.value, ind.queried ? 1.0 : 0.0, arb.queried ? 1.0 : 0.0};
    };
    null_rows[t] = run(true);
    alt_rows[t] = run(false);
  });

  TrialReport rep;
  rep.study = "gaussian";
  rep.trials = n_trials;
  rep.level = c.level;
  rep.parameters = {{"mu", c.mu},
                    {"rho", c.rho},
                    {"mu_x0", c.mu_x0},
                    {"gamma", c.gamma},
                    {"eta", c.eta},
                    {"ell_f", density.lower_bound},
                    {"eta_ell_f", c.eta * density.lower_bound},
                    {"margin", c.margin},
                    {"density_reciprocal", c.density_form == GaussianDensityForm::Reciprocal ? 1.0 : 0.0}};
  rep.grid = uniform_grid(c.grid_points);
  for (const auto& [cond, rows] : {std::pair{"null", &null_rows}, std::pair{"alternative", &alt_rows}}) {
    rep.methods.push_back(summarize("proxy", cond, column(*rows, &Row::proxy), rep.grid, c.level));
    rep.methods.push_back(summarize("true", cond, column(*rows, &Row::truth), rep.grid, c.level));
    rep.methods.push_back(summarize("ind", cond, column(*rows, &Row::ind), rep.grid, c.level,
                                    column(*rows, &Row::ind_q)));
    rep.methods.push_back(summarize("arb-dep", cond, column(*rows, &Row::arb), rep.grid, c.level,
                                    column(*rows, &Row::arb_q)));
  }
  return rep;
}

// ---- Beta study ----

std::vector<GaussianPair> simulate_beta_pairs(const BetaShape& q_shape, const BetaShape& p_shape,
                                              std::size_t count, double rho, Rng& rng) {
  check_rho(rho);
  if (count < 2) throw ParameterError("need at least 2 pairs to induce rank correlation");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(count), 2);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m(i, 0) = rng.beta(q_shape.a, q_shape.b);
    m(i, 1) = rng.beta(p_shape.a, p_shape.b);
  }
  const Eigen::MatrixXd out = iman_conover_pair(m, rho, rng);
  std::vector<GaussianPair> pairs(count);
  for (std::size_t i = 0; i < count; ++i) {
    pairs[i] = {out(static_cast<Eigen::Index>(i), 0), out(static_cast<Eigen::Index>(i), 1)};
  }
  return pairs;
}

TrialReport run_beta_study(const BetaSimConfig& c, std::size_t n_replications, std::uint64_t seed,
                           unsigned threads) {
  if (n_replications == 0) throw ParameterError("need at least one replication");
  if (!(c.pi1 >= 0.0 && c.pi1 < 1.0)) throw ParameterError("pi1 must lie in [0, 1)");
  const auto n1 = static_cast<std::size_t>(std::llround(c.pi1 * static_cast<double>(c.K)));
  const std::size_t n0 = c.K - n1;
  if (n0 < 2) throw ParameterError("need at least 2 null hypotheses");

  const auto known_f = [shape = c.null_q](double q) { return beta_density(q, shape.a, shape.b); };
  const NullDensity known{known_f, density_lower_bound(known_f, c.margin), c.margin};

  struct Row {
    double proxy, truth, known, estimated, known_q, est_q;
  };
  std::vector<std::vector<Row>> null_rows(n_replications), alt_rows(n_replications);
  std::vector<double> est_bounds(n_replications);

  parallel_for(n_replications, threads, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    std::vector<double> holdout(c.n_holdout);
    for (auto& h : holdout) h = rng.beta(c.null_q.a, c.null_q.b);
    const NullDensity estimated =
        fit_null_density(holdout, c.density_bins, c.density_floor).as_null_density(c.margin);
    est_bounds[r] = estimated.lower_bound;

    auto evaluate = [&](const std::vector<GaussianPair>& pairs, std::vector<Row>& rows) {
      rows.reserve(pairs.size());
      for (const auto& pr : pairs) {
        TrueStatOracle o1 = TrueStatOracle::constant(pr.p);
        TrueStatOracle o2 = TrueStatOracle::constant(pr.p);
        const ActiveStat k = active_pvalue_density(pr.q, o1, known, c.eta, rng);
        const ActiveStat e = active_pvalue_density(pr.q, o2, estimated, c.eta, rng);
        rows.push_back({pr.q, pr.p, k.value, e.value, k.queried ? 1.0 : 0.0, e.queried ? 1.0 : 0.0});
      }
    };
    evaluate(simulate_beta_pairs(c.null_q, c.null_p, n0, c.rho, rng), null_rows[r]);
    if (n1 >= 2) evaluate(simulate_beta_pairs(c.alt_q, c.alt_p, n1, c.rho, rng), alt_rows[r]);
  });

  auto flatten = [](const std::vector<std::vector<Row>>& parts) {
    std::vector<Row> all;
    for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return all;
  };
  const auto nulls = flatten(null_rows);
  const auto alts = flatten(alt_rows);

  TrialReport rep;
  rep.study = "beta";
  rep.trials = n_replications;
  rep.level = c.alpha;
  rep.parameters = {{"rho", c.rho},
                    {"alpha", c.alpha},
                    {"eta", c.eta},
                    {"K", static_cast<double>(c.K)},
                    {"pi1", c.pi1},
                    {"n_holdout", static_cast<double>(c.n_holdout)},
                    {"ell_f_known", known.lower_bound},
                    {"ell_f_estimated_mean", mean(est_bounds)}};
  rep.grid = uniform_grid(c.grid_points);
  for (const auto& [cond, rows] : {std::pair{"null", &nulls}, std::pair{"alternative", &alts}}) {
    if (rows->empty()) continue;
    rep.methods.push_back(summarize("proxy", cond, column(*rows, &Row::proxy), rep.grid, c.alpha));
    rep.methods.push_back(summarize("true", cond, column(*rows, &Row::truth), rep.grid, c.alpha));
    rep.methods.push_back(summarize("ind-known", cond, column(*rows, &Row::known), rep.grid, c.alpha,
                                    column(*rows, &Row::known_q)));
    rep.methods.push_back(summarize("ind-estimated", cond, column(*rows, &Row::estimated), rep.grid,
                                    c.alpha, column(*rows, &Row::est_q)));
  }
  return rep;
}

// ---- joint correction ----

JointCorrectionReport run_joint_correction_study(const BetaSimConfig& c, double rho, std::size_t n_fit,
                                                 std::size_t n_eval, double gamma, std::uint64_t seed) {
  Rng rng(seed);
  const auto fit_pairs = simulate_beta_pairs(c.null_q, c.null_p, n_fit, rho, rng);
  std::vector<std::pair<double, double>> qp;
  qp.reserve(fit_pairs.size());
  for (const auto& pr : fit_pairs) qp.emplace_back(pr.q, pr.p);
  const CondCdfEstimate estimate = fit_conditional_cdf(qp);
  const ConditionalCdf cdf = estimate.as_conditional_cdf();

  const auto eval_pairs = simulate_beta_pairs(c.null_q, c.null_p, n_eval, rho, rng);
  std::vector<double> values, queries;
  values.reserve(n_eval);
  queries.reserve(n_eval);
  for (const auto& pr : eval_pairs) {
    TrueStatOracle oracle = TrueStatOracle::constant(pr.p);
    const ActiveStat s = joint_corrected_mixture(pr.q, oracle, cdf, gamma, rng);
    values.push_back(s.value);
    queries.push_back(s.queried ? 1.0 : 0.0);
  }

  JointCorrectionReport rep;
  rep.rho = rho;
  rep.gamma = gamma;
  rep.n_fit = n_fit;
  rep.n_eval = n_eval;
  rep.q_bins = estimate.q_bin_edges.size() - 1;
  rep.ks = ks_uniform(values);
  rep.band = ks_band(n_eval);
  rep.query_freq = mean(queries);
  rep.grid = uniform_grid(c.grid_points);
  rep.ecdf = empirical_cdf(values, rep.grid);
  return rep;
}

// ---- FDR studies ----

std::string to_string(ProcedureId id) {
  switch (id) {
    case ProcedureId::BH: return "bh";
    case ProcedureId::EBH: return "ebh";
    case ProcedureId::ActiveBH: return "active-bh";
    case ProcedureId::ActiveEBH: return "active-ebh";
    case ProcedureId::PF: return "pf";
    case ProcedureId::EPF: return "epf";
  }
  return "unknown";
}

std::string to_string(ScenarioDependence dep) {
  switch (dep) {
    case ScenarioDependence::Independent: return "independent";
    case ScenarioDependence::PRDN: return "prdn";
    case ScenarioDependence::WNDN: return "wndn";
    case ScenarioDependence::Arbitrary: return "arbitrary";
  }
  return "unknown";
}

ProcedureId parse_procedure(const std::string& name) {
  for (auto id : {ProcedureId::BH, ProcedureId::EBH, ProcedureId::ActiveBH, ProcedureId::ActiveEBH,
                  ProcedureId::PF, ProcedureId::EPF}) {
    if (to_string(id) == name) return id;
  }
  throw ParameterError("unknown procedure '" + name + "'");
}

ScenarioDependence parse_dependence(const std::string& name) {
  for (auto d : {ScenarioDependence::Independent, ScenarioDependence::PRDN, ScenarioDependence::WNDN,
                 ScenarioDependence::Arbitrary}) {
    if (to_string(d) == name) return d;
  }
  throw ParameterError("unknown dependence '" + name + "'");
}

FdrStudyResult run_fdr_study(ProcedureId procedure, const FdrScenario& s, std::size_t n_trials,
                             double alpha, std::uint64_t seed, unsigned threads) {
  if (n_trials == 0) throw ParameterError("need at least one trial");
  if (s.K == 0) throw ParameterError("K must be positive");
  if (!(s.pi1 >= 0.0 && s.pi1 <= 1.0)) throw ParameterError("pi1 must lie in [0, 1]");
  if (!(s.correlation >= 0.0 && s.correlation <= 1.0)) {
    throw ParameterError("equicorrelation must lie in [0, 1]");
  }
  const auto n1 = static_cast<std::size_t>(std::llround(s.pi1 * static_cast<double>(s.K)));
  std::vector<std::size_t> alts, nulls;
  for (std::size_t i = 0; i < s.K; ++i) (i < n1 ? alts : nulls).push_back(i);

  std::vector<double> fdps(n_trials), tdps(n_trials), queried(n_trials);
  parallel_for(n_trials, threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, 0, t));
    std::vector<double> z(s.K);
    for (std::size_t i = 0; i < n1; ++i) z[i] = s.signal + rng.normal();
    const double shared = rng.normal();
    const double root_c = std::sqrt(s.correlation), root_1c = std::sqrt(1.0 - s.correlation);
    for (std::size_t k = 0; k < nulls.size(); ++k) {
      const std::size_t i = nulls[k];
      switch (s.dependence) {
        case ScenarioDependence::Independent:
          z[i] = rng.normal();
          break;
        case ScenarioDependence::PRDN:
          z[i] = root_c * shared + root_1c * rng.normal();
          break;
        case ScenarioDependence::WNDN:
          z[i] = (k % 2 == 1) ? -z[nulls[k - 1]] : rng.normal();
          break;
        case ScenarioDependence::Arbitrary:
          z[i] = shared;
          break;
      }
    }
    std::vector<double> x(s.K);
    for (std::size_t i = 0; i < s.K; ++i) x[i] = z[i] + s.proxy_bias + s.proxy_noise * rng.normal();

    const bool evalued = procedure == ProcedureId::EBH || procedure == ProcedureId::ActiveEBH ||
                         procedure == ProcedureId::EPF;
    auto stat = [&](double v) {
      return evalued ? std::exp(s.lambda * v - 0.5 * s.lambda * s.lambda) : normal_sf(v);
    };
    std::vector<double> truth(s.K), proxy(s.K);
    for (std::size_t i = 0; i < s.K; ++i) {
      truth[i] = stat(z[i]);
      proxy[i] = stat(x[i]);
    }
    std::vector<TrueStatOracle> oracles;
    oracles.reserve(s.K);
    for (double v : truth) oracles.push_back(TrueStatOracle::constant(v));

    const StatVector proxies = evalued ? make_evalues(proxy) : make_pvalues(proxy);
    const std::uint64_t proc_seed = derive_seed(seed, 1, t);
    DiscoverySet ds;
    std::size_t n_queried = s.K;
    auto count = [](const std::vector<bool>& mask) {
      return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
    };
    switch (procedure) {
      case ProcedureId::BH:
        ds = bh(make_pvalues(truth), alpha);
        break;
      case ProcedureId::EBH:
        ds = ebh(make_evalues(truth), alpha);
        break;
      case ProcedureId::ActiveBH: {
        const auto r = active_bh(proxies, oracles, s.gamma, alpha, proc_seed);
        ds = r.discoveries;
        n_queried = count(r.query_mask);
        break;
      }
      case ProcedureId::ActiveEBH: {
        const auto r = active_ebh(proxies, oracles, s.gamma, alpha, proc_seed);
        ds = r.discoveries;
        n_queried = count(r.query_mask);
        break;
      }
      case ProcedureId::PF: {
        const auto r = proxy_filter(proxies, oracles, top_m_selector(s.select_m), alpha);
        ds = r.discoveries;
        n_queried = count(r.query_mask);
        break;
      }
      case ProcedureId::EPF: {
        const auto r = e_proxy_filter(proxies, oracles, top_m_selector(s.select_m), alpha);
        ds = r.discoveries;
        n_queried = count(r.query_mask);
        break;
      }
    }
    fdps[t] = fdp(ds.rejected, nulls);
    tdps[t] = tdp(ds.rejected, alts);
    queried[t] = static_cast<double>(n_queried) / static_cast<double>(s.K);
  });

  FdrStudyResult out;
  out.trials = n_trials;
  out.fdr = mean(fdps);
  out.fdr_se = standard_error(fdps);
  out.power = mean(tdps);
  out.power_se = standard_error(tdps);
  out.query_fraction = mean(queried);
  return out;
}

// ---- 2SLS batches ----

std::vector<PanelData> simulate_sem_batch(const SemConfig& base, std::size_t hypotheses,
                                          std::uint64_t seed, unsigned threads) {
  std::vector<PanelData> out(hypotheses);
  parallel_for(hypotheses, threads, [&](std::size_t h) {
    SemConfig c = base;
    c.seed = derive_seed(seed, 0, h);
    out[h] = simulate_sem(c);
  });
  return out;
}

std::vector<Active2slsResult> run_active_2sls_batch(const std::vector<PanelData>& data, double gamma,
                                                    std::uint64_t seed, SandwichJacobian jacobian,
                                                    unsigned threads) {
  std::vector<Active2slsResult> out(data.size());
  parallel_for(data.size(), threads, [&](std::size_t h) {
    Rng rng = hypothesis_rng(seed, h);
    out[h] = active_2sls(data[h], gamma, rng, jacobian);
  });
  return out;
}

}  // namespace active
