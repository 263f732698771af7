#pragma once

// Monte-Carlo studies: the correlated-Gaussian proxy study, the Beta-marginal
// study with induced rank correlation, joint-correction checks, FDR / power
// studies over the multiple-testing procedures, and batches of synthetic
// 2SLS hypotheses. Trial t always draws from streams derived from
// (seed, t), so every report is identical for any thread count.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "active/density.hpp"
#include "active/iman_conover.hpp"
#include "active/proximal_2sls.hpp"
#include "active/random.hpp"

namespace active {

struct MethodSummary {
  std::string method;     // proxy, true, ind, arb-dep, ...
  std::string condition;  // null / alternative
  std::vector<double> ecdf;
  double ks = 0.0;                // two-sided KS against uniform
  double max_excess = 0.0;        // max over the grid of ecdf(s) - s
  double reject_rate = 0.0;       // fraction <= the reporting level
  double reject_se = 0.0;
  double query_freq = 0.0;        // only meaningful when has_queries
  double query_se = 0.0;
  bool has_queries = false;
  std::size_t samples = 0;
};

struct TrialReport {
  std::string study;
  std::size_t trials = 0;
  double level = 0.05;  // threshold for reject_rate
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<double> grid;
  std::vector<MethodSummary> methods;

  const MethodSummary& find(const std::string& method, const std::string& condition) const;
};

// Draws a summary from samples; queries may be empty.
MethodSummary summarize(std::string method, std::string condition, const std::vector<double>& values,
                        const std::vector<double>& grid, double level,
                        const std::vector<double>& queries = {});

// ---- correlated Gaussian proxy / true p-values ----

struct GaussianSimConfig {
  double mu = 1.0;     // alternative mean of X; Z has mean rho * mu
  double rho = 0.5;    // correlation of X and Z
  double mu_x0 = 0.3;  // null mean of X
  // eta * l_f comes to about 0.19 with the default density, and gamma then
  // gives both methods the same query rate under the null.
  double gamma = 0.45; // arb-dep tuning
  double eta = 0.5;    // density-method tuning
  // The density of the null proxy used by the "ind" method.
  GaussianDensityForm density_form = GaussianDensityForm::ChangeOfVariables;
  double margin = kDefaultMargin;
  std::size_t grid_points = 200;
  double level = 0.05;
};

struct GaussianPair {
  double q = 0.0;  // 1 - Phi(X)
  double p = 0.0;  // 1 - Phi(Z)
};

GaussianPair simulate_gaussian_pair(const GaussianSimConfig& config, bool is_null, Rng& rng);

// One null and one alternative draw per trial; methods proxy, true, ind and
// arb-dep under each condition.
TrialReport run_gaussian_study(const GaussianSimConfig& config, std::size_t n_trials,
                               std::uint64_t seed, unsigned threads = 1);

// ---- Beta marginals with Iman-Conover rank correlation ----

struct BetaShape {
  double a = 1.0;
  double b = 1.0;
};

struct BetaSimConfig {
  BetaShape null_q{0.5, 1.0};
  BetaShape null_p{1.0, 1.0};
  BetaShape alt_q{2.0, 5.0};
  BetaShape alt_p{0.2, 1.0};
  std::size_t K = 2000;  // hypotheses per replication
  double pi1 = 0.5;      // fraction of alternatives
  double rho = 0.0;      // target Spearman correlation of (Q, P)
  double alpha = 0.05;
  double eta = 1.0;
  std::size_t n_holdout = 200;  // null proxies used to estimate the density
  std::size_t density_bins = 10;
  double density_floor = kDefaultDensityFloor;
  double margin = kDefaultMargin;
  std::size_t grid_points = 200;
};

// Rows of (Q, P) for `count` hypotheses of one kind, rank-correlated.
std::vector<GaussianPair> simulate_beta_pairs(const BetaShape& q_shape, const BetaShape& p_shape,
                                              std::size_t count, double rho, Rng& rng);

// Each replication draws K hypotheses and a fresh holdout. Methods: proxy,
// true, ind-known (exact null density), ind-estimated (histogram fit on the
// holdout). reject_rate under "null" is the false-positive rate at alpha and
// under "alternative" the power.
TrialReport run_beta_study(const BetaSimConfig& config, std::size_t n_replications,
                           std::uint64_t seed, unsigned threads = 1);

// ---- joint correction ----

struct JointCorrectionReport {
  double rho = 0.0;
  double gamma = 0.0;
  std::size_t n_fit = 0;
  std::size_t n_eval = 0;
  std::size_t q_bins = 0;
  double ks = 0.0;
  double band = 0.0;
  double query_freq = 0.0;
  std::vector<double> grid;
  std::vector<double> ecdf;
};

// Fits F(p | q) on n_fit null pairs and applies the mixture correction to
// n_eval fresh null pairs.
JointCorrectionReport run_joint_correction_study(const BetaSimConfig& config, double rho,
                                                 std::size_t n_fit, std::size_t n_eval,
                                                 double gamma, std::uint64_t seed);

// ---- FDR / power ----

enum class ProcedureId { BH, EBH, ActiveBH, ActiveEBH, PF, EPF };
enum class ScenarioDependence { Independent, PRDN, WNDN, Arbitrary };

std::string to_string(ProcedureId id);
std::string to_string(ScenarioDependence dep);
ProcedureId parse_procedure(const std::string& name);
ScenarioDependence parse_dependence(const std::string& name);

// True statistic Z_i ~ N(0, 1) for nulls and N(signal, 1) otherwise, with
// null dependence set by `dependence`:
//   Independent: iid. PRDN: equicorrelated with correlation `correlation`.
//   WNDN: antithetic pairs (Z, -Z). Arbitrary: all nulls share one draw.
// Proxy X_i = Z_i + proxy_bias + proxy_noise * xi_i. p-values are one-sided
// 1 - Phi(.), e-values the likelihood ratio exp(lambda z - lambda^2 / 2).
struct FdrScenario {
  std::size_t K = 100;
  double pi1 = 0.2;
  ScenarioDependence dependence = ScenarioDependence::Independent;
  double signal = 3.0;
  double correlation = 0.5;
  double proxy_bias = 0.5;
  double proxy_noise = 0.5;
  double lambda = 3.0;
  double gamma = 0.5;
  std::size_t select_m = 20;  // PF / e-PF select the m most significant proxies
};

struct FdrStudyResult {
  std::size_t trials = 0;
  double fdr = 0.0;
  double fdr_se = 0.0;
  double power = 0.0;
  double power_se = 0.0;
  double query_fraction = 0.0;
};

FdrStudyResult run_fdr_study(ProcedureId procedure, const FdrScenario& scenario,
                             std::size_t n_trials, double alpha, std::uint64_t seed,
                             unsigned threads = 1);

// ---- batches of synthetic 2SLS hypotheses ----

// Hypothesis h uses SEM seed derive_seed(seed, 0, h) and query stream
// hypothesis_rng(seed, h).
std::vector<PanelData> simulate_sem_batch(const SemConfig& base, std::size_t hypotheses,
                                          std::uint64_t seed, unsigned threads = 1);

std::vector<Active2slsResult> run_active_2sls_batch(const std::vector<PanelData>& data,
                                                    double gamma, std::uint64_t seed,
                                                    SandwichJacobian jacobian,
                                                    unsigned threads = 1);

}  // namespace active
