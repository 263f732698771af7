#include "active/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"

#include "active/adaptive.hpp"
#include "active/density.hpp"
#include "active/error.hpp"
#include "active/io.hpp"
#include "active/mt_procedures.hpp"
#include "active/parallel.hpp"
#include "active/proximal_2sls.hpp"
#include "active/sim_harness.hpp"

namespace active::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

// Writes to `path`, or to `out` when the path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::write_text(path, text);
  }
}

void merge(Json& dst, const Json& src) {
  for (auto it = src.begin(); it != src.end(); ++it) dst[it.key()] = it.value();
}

// ---- simulate ----

struct GaussianOpts {
  GaussianSimConfig cfg;
  std::size_t trials = 1000;
  std::string form = "cov";
  std::string json, csv;
};

struct BetaOpts {
  BetaSimConfig cfg;
  std::size_t replications = 10;
  std::string json, csv;
};

struct JointOpts {
  BetaSimConfig cfg;
  double rho = 0.0;
  double gamma = 0.0;
  std::size_t n_fit = 10000;
  std::size_t n_eval = 10000;
  std::string json;
};

struct FdrOpts {
  FdrScenario scenario;
  std::string procedure = "active-ebh";
  std::string dependence = "independent";
  std::size_t trials = 2000;
  double alpha = 0.05;
  std::string json;
};

struct SemOpts {
  SemConfig cfg;
  std::size_t hypotheses = 10;
  std::string out_dir;
};

void add_beta_shape_options(CLI::App* app, BetaSimConfig& c) {
  app->add_option("--null-q-a", c.null_q.a, "Beta a of null proxies");
  app->add_option("--null-q-b", c.null_q.b, "Beta b of null proxies");
  app->add_option("--null-p-a", c.null_p.a, "Beta a of null true p-values");
  app->add_option("--null-p-b", c.null_p.b, "Beta b of null true p-values");
  app->add_option("--alt-q-a", c.alt_q.a, "Beta a of alternative proxies");
  app->add_option("--alt-q-b", c.alt_q.b, "Beta b of alternative proxies");
  app->add_option("--alt-p-a", c.alt_p.a, "Beta a of alternative true p-values");
  app->add_option("--alt-p-b", c.alt_p.b, "Beta b of alternative true p-values");
}

void run_simulate_gaussian(const GaussianOpts& o, const Globals& g, std::ostream& out) {
  GaussianSimConfig cfg = o.cfg;
  if (o.form == "reciprocal") {
    cfg.density_form = GaussianDensityForm::Reciprocal;
  } else if (o.form == "cov") {
    cfg.density_form = GaussianDensityForm::ChangeOfVariables;
  } else {
    throw ConfigurationError("--density-form must be reciprocal or cov");
  }
  const TrialReport r = run_gaussian_study(cfg, o.trials, g.seed, g.threads);
  if (!o.csv.empty()) io::write_text(o.csv, io::to_csv(r));
  emit(o.json, io::dump(io::to_json(r)), out);
}

void run_simulate_beta(const BetaOpts& o, const Globals& g, std::ostream& out) {
  const TrialReport r = run_beta_study(o.cfg, o.replications, g.seed, g.threads);
  if (!o.csv.empty()) io::write_text(o.csv, io::to_csv(r));
  emit(o.json, io::dump(io::to_json(r)), out);
}

void run_simulate_joint(const JointOpts& o, const Globals& g, std::ostream& out) {
  const auto r = run_joint_correction_study(o.cfg, o.rho, o.n_fit, o.n_eval, o.gamma, g.seed);
  emit(o.json, io::dump(io::to_json(r)), out);
}

void run_simulate_fdr(const FdrOpts& o, const Globals& g, std::ostream& out) {
  FdrScenario s = o.scenario;
  s.dependence = parse_dependence(o.dependence);
  const ProcedureId proc = parse_procedure(o.procedure);
  const auto r = run_fdr_study(proc, s, o.trials, o.alpha, g.seed, g.threads);
  Json j;
  j["procedure"] = to_string(proc);
  j["dependence"] = to_string(s.dependence);
  j["alpha"] = o.alpha;
  j["K"] = s.K;
  j["pi1"] = s.pi1;
  merge(j, io::to_json(r));
  emit(o.json, io::dump(j), out);
}

void run_simulate_sem(const SemOpts& o, const Globals& g, std::ostream& out) {
  const auto batch = simulate_sem_batch(o.cfg, o.hypotheses, g.seed, g.threads);
  fs::create_directories(o.out_dir);
  for (std::size_t h = 0; h < batch.size(); ++h) {
    char name[32];
    std::snprintf(name, sizeof name, "h%05zu.csv", h + 1);
    io::write_panel_csv(fs::path(o.out_dir) / name, batch[h]);
  }
  Json j;
  j["out_dir"] = o.out_dir;
  j["hypotheses"] = batch.size();
  j["n"] = o.cfg.n;
  j["d"] = o.cfg.d;
  j["beta_a"] = o.cfg.beta_a;
  out << io::dump(j);
}

// ---- test ----

struct TestOpts {
  std::string procedure;
  std::string input;
  std::string output;
  std::string column = "proxy";
  double alpha = 0.05;
  double gamma = 0.5;
  std::size_t select_m = 0;
};

StatVector checked_stats(const std::vector<double>& values, StatKind kind,
                         const std::vector<std::string>& ids, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!in_domain(kind, values[i])) {
      throw DataError(std::string(what) + " value for id " + ids[i] + " is not a valid " +
                      std::string(to_string(kind)));
    }
  }
  StatVector s{values, kind, ids};
  return s;
}

void run_test(const TestOpts& o, const Globals& g, std::ostream& out) {
  static const std::map<std::string, StatKind> kinds = {
      {"bh", StatKind::PValue},        {"ebh", StatKind::EValue}, {"active-bh", StatKind::PValue},
      {"active-ebh", StatKind::EValue}, {"pf", StatKind::PValue},  {"epf", StatKind::EValue}};
  const StatKind kind = kinds.at(o.procedure);
  const io::StatsInput in = io::read_stats_csv(o.input);

  const StatVector proxies = checked_stats(in.proxy, kind, in.ids, "proxy");
  std::vector<TrueStatOracle> oracles(in.ids.size());
  if (in.truth) {
    checked_stats(*in.truth, kind, in.ids, "true");
    for (std::size_t i = 0; i < oracles.size(); ++i) oracles[i] = TrueStatOracle::constant((*in.truth)[i]);
  }

  DiscoverySet ds;
  StatVector used;
  std::vector<bool> mask(in.ids.size(), false);
  if (o.procedure == "bh" || o.procedure == "ebh") {
    if (o.column == "proxy") {
      used = proxies;
    } else if (o.column == "true") {
      if (!in.truth) throw DataError(o.input + " has no 'true' column");
      used = StatVector{*in.truth, kind, in.ids};
      mask.assign(mask.size(), true);
    } else {
      throw ConfigurationError("--column must be proxy or true");
    }
    ds = kind == StatKind::PValue ? bh(used, o.alpha) : ebh(used, o.alpha);
  } else if (o.procedure == "active-bh" || o.procedure == "active-ebh") {
    ActiveResult r = kind == StatKind::PValue
                         ? active_bh(proxies, oracles, o.gamma, o.alpha, g.seed, g.threads)
                         : active_ebh(proxies, oracles, o.gamma, o.alpha, g.seed, g.threads);
    ds = r.discoveries;
    used = std::move(r.stats);
    mask = std::move(r.query_mask);
  } else {
    const auto selector = o.select_m == 0 ? select_all() : top_m_selector(o.select_m);
    FilterResult r = kind == StatKind::PValue ? proxy_filter(proxies, oracles, selector, o.alpha)
                                              : e_proxy_filter(proxies, oracles, selector, o.alpha);
    ds = r.discoveries;
    used = std::move(r.stats);
    mask = std::move(r.query_mask);
  }

  Json j;
  j["procedure"] = o.procedure;
  merge(j, io::to_json(ds, used, mask));
  Json values = Json::array();
  for (double v : used.values) values.push_back(io::number_or_null(v));
  j["statistics"] = values;
  emit(o.output, io::dump(j), out);
}

// ---- 2sls ----

struct TslsOpts {
  std::string data;
  std::string output;
  double gamma = 0.5;
  bool no_timings = false;
  std::string jacobian = "full";
};

void run_2sls(const TslsOpts& o, const Globals& g, std::ostream& out) {
  SandwichJacobian jac;
  if (o.jacobian == "full") {
    jac = SandwichJacobian::Full;
  } else if (o.jacobian == "block") {
    jac = SandwichJacobian::BlockDiagonal;
  } else {
    throw ConfigurationError("--jacobian must be full or block");
  }
  const auto panels = io::read_panels(o.data);
  std::vector<PanelData> data;
  data.reserve(panels.size());
  for (const auto& p : panels) {
    try {
      validate(p.data);
    } catch (const ParameterError& e) {
      throw ParameterError(p.id + ": " + e.what());
    }
    data.push_back(p.data);
  }
  const auto results = run_active_2sls_batch(data, o.gamma, g.seed, jac, g.threads);
  std::string text;
  for (std::size_t h = 0; h < results.size(); ++h) {
    const auto& r = results[h];
    Json j;
    j["id"] = panels[h].id;
    j["Q"] = r.ols.pvalue;
    j["query_prob"] = r.stat.query_prob;
    j["queried"] = r.stat.queried;
    j["P"] = r.tsls ? Json(r.tsls->pvalue) : Json(nullptr);
    j["active_p"] = r.stat.value;
    j["psi_ols"] = r.ols.psi_hat;
    j["psi_tsls"] = r.tsls ? Json(r.tsls->fit.psi_hat) : Json(nullptr);
    j["se_tsls"] = r.tsls ? Json(r.tsls->se) : Json(nullptr);
    j["weak_first_stage"] = r.tsls ? Json(r.tsls->fit.weak_first_stage) : Json(nullptr);
    j["elapsed_proxy_s"] = o.no_timings ? Json(nullptr) : Json(r.elapsed_proxy_s);
    j["elapsed_true_s"] = o.no_timings || !r.tsls ? Json(nullptr) : Json(r.elapsed_true_s);
    text += j.dump() + "\n";
  }
  emit(o.output, text, out);
}

// ---- tune ----

struct TuneOpts {
  std::string samples;
  std::string output;
  double budget = 0.0;
  bool pvalues = false;
  double step = 0.01;
  std::optional<double> ell_f;
};

void run_tune(const TuneOpts& o, const Globals& g, std::ostream& out) {
  if (o.samples.empty() && !o.ell_f) throw ConfigurationError("tune needs --samples or --ell-f");
  Json j;
  j["budget"] = o.budget;
  if (!o.samples.empty()) {
    auto pairs = io::read_pairs_csv(o.samples);
    if (o.pvalues) {
      for (const auto& p : pairs) {
        if (p.proxy > 1.0 || p.truth > 1.0) throw DataError("p-value pairs must lie in [0, 1]");
      }
      pairs = from_pvalue_pairs(pairs);
    }
    const TuneResult r = tune_gamma(pairs, o.budget, o.step, g.threads);
    merge(j, io::to_json(r));
  }
  if (o.ell_f) {
    j["ell_f"] = *o.ell_f;
    j["eta_star"] = eta_for_budget(o.budget, *o.ell_f);
  }
  emit(o.output, io::dump(j), out);
}

// ---- fitted null models ----

struct FitDensityOpts {
  std::string input, output;
  std::size_t bins = 20;
  double floor = kDefaultDensityFloor;
  double margin = kDefaultMargin;
};

void run_fit_density(const FitDensityOpts& o, std::ostream& out) {
  const GridDensity d = fit_null_density(io::read_values_csv(o.input), o.bins, o.floor);
  Json j = io::to_json(d);
  j["margin"] = o.margin;
  j["lower_bound"] = density_lower_bound(d, o.margin);
  emit(o.output, io::dump(j), out);
}

struct FitJointOpts {
  std::string input, output;
  std::size_t q_bins = 0;
  std::size_t p_grid = 201;
  std::size_t min_per_bin = 20;
};

void run_fit_joint(const FitJointOpts& o, std::ostream& out) {
  std::vector<std::pair<double, double>> qp;
  for (const auto& p : io::read_pairs_csv(o.input)) {
    if (p.proxy > 1.0 || p.truth > 1.0) throw DataError("(q, p) pairs must lie in [0, 1]");
    qp.emplace_back(p.proxy, p.truth);
  }
  const CondCdfEstimate e = fit_conditional_cdf(qp, o.q_bins, o.p_grid, o.min_per_bin);
  emit(o.output, io::dump(io::to_json(e)), out);
}

struct CorrectJointOpts {
  std::string model, input, output;
  std::optional<double> gamma;
};

void run_correct_joint(const CorrectJointOpts& o, const Globals& g, std::ostream& out) {
  const CondCdfEstimate est = io::cond_cdf_from_json(io::read_json(o.model));
  const ConditionalCdf cdf = est.as_conditional_cdf();
  const io::StatsInput in = io::read_stats_csv(o.input);
  checked_stats(in.proxy, StatKind::PValue, in.ids, "proxy");
  if (in.truth) checked_stats(*in.truth, StatKind::PValue, in.ids, "true");

  const std::size_t K = in.ids.size();
  std::vector<ActiveStat> stats(K);
  parallel_for(K, g.threads, [&](std::size_t i) {
    Rng rng = hypothesis_rng(g.seed, i);
    if (o.gamma) {
      TrueStatOracle oracle = in.truth ? TrueStatOracle::constant((*in.truth)[i]) : TrueStatOracle();
      stats[i] = joint_corrected_mixture(in.proxy[i], oracle, cdf, *o.gamma, rng);
    } else {
      stats[i].value = joint_corrected_pvalue(in.proxy[i], cdf, rng);
    }
  });

  Json records = Json::array();
  std::size_t queries = 0;
  for (std::size_t i = 0; i < K; ++i) {
    Json r;
    r["id"] = in.ids[i];
    r["Q"] = in.proxy[i];
    r["value"] = stats[i].value;
    r["queried"] = stats[i].queried;
    queries += stats[i].queried;
    records.push_back(r);
  }
  Json j;
  j["gamma"] = o.gamma ? Json(*o.gamma) : Json(nullptr);
  j["query_count"] = queries;
  j["records"] = records;
  emit(o.output, io::dump(j), out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Active hypothesis testing with proxy statistics", "active-stats"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed (default 0)")->envname("ACTIVE_STATS_SEED");
  app.add_option("--threads", g.threads, "Worker threads, 0 = all cores");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a Monte-Carlo study");
  sim->require_subcommand(1);

  GaussianOpts go;
  auto* gauss = sim->add_subcommand("gaussian", "Correlated Gaussian proxy study");
  gauss->add_option("--mu", go.cfg.mu, "Alternative mean");
  gauss->add_option("--rho", go.cfg.rho, "Correlation of proxy and true statistic");
  gauss->add_option("--mu-x0", go.cfg.mu_x0, "Null mean of the proxy statistic");
  gauss->add_option("--gamma", go.cfg.gamma, "Tuning of the arbitrary-dependence method");
  gauss->add_option("--eta", go.cfg.eta, "Tuning of the density method");
  gauss->add_option("--density-form", go.form, "Null proxy density: cov or reciprocal");
  gauss->add_option("--margin", go.cfg.margin, "Certified domain margin");
  gauss->add_option("--grid", go.cfg.grid_points, "ECDF grid points");
  gauss->add_option("--level", go.cfg.level, "Rejection level for reported rates");
  gauss->add_option("--trials", go.trials, "Number of trials");
  gauss->add_option("--json", go.json, "JSON report path (default stdout)");
  gauss->add_option("--csv", go.csv, "CSV report path");

  BetaOpts bo;
  bo.cfg.rho = 0.95;
  auto* beta = sim->add_subcommand("beta", "Beta marginals with induced rank correlation");
  beta->add_option("--rho", bo.cfg.rho, "Target Spearman correlation of (Q, P)");
  beta->add_option("--alpha", bo.cfg.alpha, "Level for the false-positive rate");
  beta->add_option("--eta", bo.cfg.eta, "Tuning of the density method");
  beta->add_option("-K,--hypotheses", bo.cfg.K, "Hypotheses per replication");
  beta->add_option("--pi1", bo.cfg.pi1, "Fraction of alternatives");
  beta->add_option("--holdout", bo.cfg.n_holdout, "Held-out null proxies for the density fit");
  beta->add_option("--bins", bo.cfg.density_bins, "Histogram bins");
  beta->add_option("--floor", bo.cfg.density_floor, "Density floor");
  beta->add_option("--margin", bo.cfg.margin, "Certified domain margin");
  beta->add_option("--grid", bo.cfg.grid_points, "ECDF grid points");
  beta->add_option("--replications", bo.replications, "Replications");
  add_beta_shape_options(beta, bo.cfg);
  beta->add_option("--json", bo.json, "JSON report path (default stdout)");
  beta->add_option("--csv", bo.csv, "CSV report path");

  JointOpts jo;
  auto* joint = sim->add_subcommand("joint", "Joint correction with an estimated conditional CDF");
  joint->add_option("--rho", jo.rho, "Target Spearman correlation of null (Q, P)");
  joint->add_option("--gamma", jo.gamma, "Query probability");
  joint->add_option("--n-fit", jo.n_fit, "Pairs used for the fit");
  joint->add_option("--n-eval", jo.n_eval, "Fresh pairs to correct");
  add_beta_shape_options(joint, jo.cfg);
  joint->add_option("--json", jo.json, "JSON report path (default stdout)");

  FdrOpts fo;
  auto* fdr = sim->add_subcommand("fdr", "FDR and power of a multiple-testing procedure");
  fdr->add_option("--procedure", fo.procedure, "bh, ebh, active-bh, active-ebh, pf or epf");
  fdr->add_option("--dependence", fo.dependence, "independent, prdn, wndn or arbitrary");
  fdr->add_option("--trials", fo.trials, "Number of trials");
  fdr->add_option("--alpha", fo.alpha, "Target FDR level");
  fdr->add_option("-K,--hypotheses", fo.scenario.K, "Hypotheses per trial");
  fdr->add_option("--pi1", fo.scenario.pi1, "Fraction of alternatives");
  fdr->add_option("--signal", fo.scenario.signal, "Alternative mean");
  fdr->add_option("--correlation", fo.scenario.correlation, "Null correlation (prdn)");
  fdr->add_option("--proxy-bias", fo.scenario.proxy_bias, "Proxy bias");
  fdr->add_option("--proxy-noise", fo.scenario.proxy_noise, "Proxy noise scale");
  fdr->add_option("--lambda", fo.scenario.lambda, "Likelihood-ratio e-value parameter");
  fdr->add_option("--gamma", fo.scenario.gamma, "Tuning of active procedures");
  fdr->add_option("--select-m", fo.scenario.select_m, "Selection size of the proxy filters");
  fdr->add_option("--json", fo.json, "JSON report path (default stdout)");

  SemOpts so;
  auto* sem = sim->add_subcommand("sem", "Write synthetic proximal-inference datasets");
  sem->add_option("--out-dir", so.out_dir, "Output directory")->required();
  sem->add_option("--hypotheses", so.hypotheses, "Number of datasets");
  sem->add_option("-n,--n", so.cfg.n, "Rows per dataset");
  sem->add_option("-d,--d", so.cfg.d, "Number of negative controls of each kind");
  sem->add_option("--beta-a", so.cfg.beta_a, "Treatment effect");
  sem->add_option("--confounding", so.cfg.confounding, "Confounder effect on treatment");
  sem->add_option("--z-to-a", so.cfg.z_to_a, "Direct effect of exposures on treatment");

  // test
  TestOpts to;
  auto* test = app.add_subcommand("test", "Multiple testing on a CSV of statistics");
  test->add_option("procedure", to.procedure, "bh, ebh, active-bh, active-ebh, pf or epf")
      ->required()
      ->check(CLI::IsMember({"bh", "ebh", "active-bh", "active-ebh", "pf", "epf"}));
  test->add_option("--input", to.input, "CSV with columns id,proxy[,true]")->required();
  test->add_option("--alpha", to.alpha, "Target FDR level");
  test->add_option("--gamma", to.gamma, "Tuning of active procedures");
  test->add_option("--select-m", to.select_m, "Proxy filters keep the m most significant (0 = all)");
  test->add_option("--column", to.column, "Column used by bh / ebh: proxy or true");
  test->add_option("-o,--output", to.output, "Output path (default stdout)");

  // 2sls
  TslsOpts ts;
  auto* tsls = app.add_subcommand("2sls", "Active proximal 2SLS over a batch of datasets");
  tsls->add_option("--data", ts.data, "Dataset file or directory")->required();
  tsls->add_option("--gamma", ts.gamma, "Tuning of the active p-value");
  tsls->add_flag("--no-timings", ts.no_timings, "Report timings as null");
  tsls->add_option("--jacobian", ts.jacobian, "Sandwich Jacobian: full or block");
  tsls->add_option("-o,--output", ts.output, "Output path (default stdout)");

  // tune
  TuneOpts tu;
  auto* tune = app.add_subcommand("tune", "Choose gamma or eta for a query budget");
  tune->add_option("--samples", tu.samples, "CSV of (proxy, true) pairs");
  tune->add_option("--budget", tu.budget, "Largest allowed query fraction")->required();
  tune->add_flag("--pvalues", tu.pvalues, "Samples are (q, p) p-value pairs");
  tune->add_option("--step", tu.step, "Gamma grid step");
  tune->add_option("--ell-f", tu.ell_f, "Certified density lower bound, for eta");
  tune->add_option("-o,--output", tu.output, "Output path (default stdout)");

  FitDensityOpts fd;
  auto* fitd = app.add_subcommand("fit-density", "Histogram fit of the null proxy density");
  fitd->add_option("--input", fd.input, "CSV of null proxy p-values")->required();
  fitd->add_option("--bins", fd.bins, "Number of bins");
  fitd->add_option("--floor", fd.floor, "Density floor");
  fitd->add_option("--margin", fd.margin, "Certified domain margin");
  fitd->add_option("-o,--output", fd.output, "Output path (default stdout)");

  FitJointOpts fj;
  auto* fitj = app.add_subcommand("fit-joint", "Fit the null conditional CDF of P given Q");
  fitj->add_option("--input", fj.input, "CSV of null (q, p) pairs")->required();
  fitj->add_option("--q-bins", fj.q_bins, "Proxy bins (0 = automatic)");
  fitj->add_option("--p-grid", fj.p_grid, "Points of the p grid");
  fitj->add_option("--min-per-bin", fj.min_per_bin, "Smallest bin after merging");
  fitj->add_option("-o,--output", fj.output, "Output path (default stdout)");

  CorrectJointOpts cj;
  auto* corr = app.add_subcommand("correct-joint", "Apply the joint correction to proxies");
  corr->add_option("--model", cj.model, "Fitted conditional CDF JSON")->required();
  corr->add_option("--input", cj.input, "CSV with columns id,proxy[,true]")->required();
  corr->add_option("--gamma", cj.gamma, "Query probability of the mixture (omit for pure correction)");
  corr->add_option("-o,--output", cj.output, "Output path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (const CLI::App* sub = &app; sub;) {
      failing = sub;
      const auto subs = sub->get_subcommands();
      sub = subs.empty() ? nullptr : subs.front();
    }
    err << failing->help();
    return 2;
  }

  try {
    if (gauss->parsed()) run_simulate_gaussian(go, g, out);
    else if (beta->parsed()) run_simulate_beta(bo, g, out);
    else if (joint->parsed()) run_simulate_joint(jo, g, out);
    else if (fdr->parsed()) run_simulate_fdr(fo, g, out);
    else if (sem->parsed()) run_simulate_sem(so, g, out);
    else if (test->parsed()) run_test(to, g, out);
    else if (tsls->parsed()) run_2sls(ts, g, out);
    else if (tune->parsed()) run_tune(tu, g, out);
    else if (fitd->parsed()) run_fit_density(fd, out);
    else if (fitj->parsed()) run_fit_joint(fj, out);
    else if (corr->parsed()) run_correct_joint(cj, g, out);
    return 0;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const EstimationError& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const SingularDesignError& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace active::cli
