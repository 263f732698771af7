#include "active/active_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "active/error.hpp"

namespace active {

namespace {

double clamp_probability(double p) {
  if (std::isnan(p) || p < -kProbabilityTolerance || p > 1.0 + kProbabilityTolerance) {
    throw DomainError("Bernoulli parameter " + std::to_string(p) + " outside [0, 1]");
  }
  return std::clamp(p, 0.0, 1.0);
}

void check_uniform(double u) {
  if (!(u >= 0.0 && u < 1.0)) throw ParameterError("uniform draw must lie in [0, 1)");
}

void check_evalue_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("gamma must lie in (0, 1]");
}

void check_pvalue_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ParameterError("gamma must lie in [0, 1)");
}

void check_proxy_q(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("proxy p-value must lie in [0, 1]");
}

double checked_evalue(TrueStatOracle& oracle) {
  const double e = oracle.query();
  if (!in_domain(StatKind::EValue, e)) {
    throw DomainError("true e-value " + std::to_string(e) + " is negative or NaN");
  }
  return e;
}

double checked_pvalue(TrueStatOracle& oracle) {
  const double p = oracle.query();
  if (!in_domain(StatKind::PValue, p)) {
    throw DomainError("true p-value " + std::to_string(p) + " outside [0, 1]");
  }
  return p;
}

}  // namespace

std::string_view to_string(StatKind kind) {
  return kind == StatKind::PValue ? "p-value" : "e-value";
}

bool in_domain(StatKind kind, double value) {
  if (std::isnan(value)) return false;
  if (kind == StatKind::PValue) return value >= 0.0 && value <= 1.0;
  return value >= 0.0;
}

double TrueStatOracle::query() {
  if (!query_) throw ConfigurationError("true statistic is unavailable for this hypothesis");
  ++count_;
  return query_();
}

double query_prob_evalue(double proxy_f, double gamma) {
  if (!(proxy_f >= 0.0)) throw ParameterError("proxy e-value must be nonnegative");
  check_evalue_gamma(gamma);
  if (proxy_f <= gamma) return 0.0;  // also covers F = 0
  return clamp_probability(1.0 - gamma / proxy_f);
}

double query_prob_arbdep(double proxy_q, double gamma) {
  check_proxy_q(proxy_q);
  check_pvalue_gamma(gamma);
  return clamp_probability(1.0 - gamma * proxy_q);
}

double query_prob_density(double proxy_q, const NullDensity& density, double eta) {
  check_proxy_q(proxy_q);
  if (!(eta >= 0.0 && eta <= 1.0)) throw ParameterError("eta must lie in [0, 1]");
  if (!(density.lower_bound > 0.0)) throw ParameterError("density lower bound must be positive");
  if (eta == 0.0) return 1.0;
  const double f = density.eval(proxy_q);
  if (std::isnan(f) || f < 0.0) throw DomainError("null density returned a negative or NaN value");
  const double floor = eta * density.lower_bound;
  if (f < floor * (1.0 - kProbabilityTolerance)) {
    if (density.certified_at(proxy_q)) {
      throw InconsistentDensityError("f(" + std::to_string(proxy_q) + ") = " + std::to_string(f) +
                                     " is below eta * l_f = " + std::to_string(floor));
    }
    return 1.0;
  }
  return clamp_probability(1.0 - floor / f);
}

ActiveStat active_evalue(double proxy_f, TrueStatOracle& oracle, double gamma, double u) {
  check_uniform(u);
  ActiveStat out{.value = proxy_f,
                 .queried = false,
                 .query_prob = query_prob_evalue(proxy_f, gamma),
                 .kind = StatKind::EValue,
                 .gamma_or_eta = gamma,
                 .uniform = u};
  if (u < out.query_prob) {
    out.queried = true;
    out.value = (1.0 - gamma) * checked_evalue(oracle);
  }
  return out;
}

ActiveStat active_evalue(double proxy_f, TrueStatOracle& oracle, double gamma, Rng& rng) {
  return active_evalue(proxy_f, oracle, gamma, rng.uniform());
}

ActiveStat active_pvalue_arbdep(double proxy_q, TrueStatOracle& oracle, double gamma, double u) {
  check_uniform(u);
  ActiveStat out{.value = proxy_q,
                 .queried = false,
                 .query_prob = query_prob_arbdep(proxy_q, gamma),
                 .kind = StatKind::PValue,
                 .gamma_or_eta = gamma,
                 .uniform = u};
  if (u < out.query_prob) {
    out.queried = true;
    out.value = std::min(checked_pvalue(oracle) / (1.0 - gamma), 1.0);
  }
  return out;
}

ActiveStat active_pvalue_arbdep(double proxy_q, TrueStatOracle& oracle, double gamma, Rng& rng) {
  return active_pvalue_arbdep(proxy_q, oracle, gamma, rng.uniform());
}

ActiveStat active_pvalue_density(double proxy_q, TrueStatOracle& oracle,
                                 const NullDensity& density, double eta, double u) {
  check_uniform(u);
  ActiveStat out{.value = proxy_q,
                 .queried = false,
                 .query_prob = query_prob_density(proxy_q, density, eta),
                 .kind = StatKind::PValue,
                 .gamma_or_eta = eta,
                 .uniform = u};
  if (u < out.query_prob) {
    out.queried = true;
    out.value = checked_pvalue(oracle);
  }
  return out;
}

ActiveStat active_pvalue_density(double proxy_q, TrueStatOracle& oracle,
                                 const NullDensity& density, double eta, Rng& rng) {
  return active_pvalue_density(proxy_q, oracle, density, eta, rng.uniform());
}

ActiveStat sr_active_evalue(double proxy_f, TrueStatOracle& oracle, double gamma, double u) {
  check_uniform(u);
  ActiveStat out{.value = proxy_f,
                 .queried = false,
                 .query_prob = query_prob_evalue(proxy_f, gamma),
                 .kind = StatKind::EValue,
                 .gamma_or_eta = gamma,
                 .uniform = u};
  if (u < out.query_prob) {
    out.queried = true;
    out.value = (1.0 - gamma) / out.query_prob * checked_evalue(oracle);
  }
  return out;
}

ActiveStat sr_active_evalue(double proxy_f, TrueStatOracle& oracle, double gamma, Rng& rng) {
  return sr_active_evalue(proxy_f, oracle, gamma, rng.uniform());
}

double coupled_lowerbound_pvalue(double true_p, double gamma, double uniform_u) {
  if (!(true_p >= 0.0 && true_p <= 1.0)) throw ParameterError("true p-value must lie in [0, 1]");
  check_pvalue_gamma(gamma);
  if (!(uniform_u >= 0.0 && uniform_u <= 1.0)) throw ParameterError("uniform must lie in [0, 1]");
  const double scaled = true_p / (1.0 - gamma);
  const double randomized =
      gamma == 0.0 ? std::numeric_limits<double>::infinity() : uniform_u / gamma;
  return std::min({scaled, randomized, 1.0});
}

double joint_corrected_pvalue(double proxy_q, const ConditionalCdf& cdf, double u) {
  check_proxy_q(proxy_q);
  if (!(u >= 0.0 && u <= 1.0)) throw ParameterError("uniform must lie in [0, 1]");
  return std::clamp(cdf.inverse(u, proxy_q), 0.0, 1.0);
}

double joint_corrected_pvalue(double proxy_q, const ConditionalCdf& cdf, Rng& rng) {
  return joint_corrected_pvalue(proxy_q, cdf, rng.uniform());
}

ActiveStat joint_corrected_mixture(double proxy_q, TrueStatOracle& oracle,
                                   const ConditionalCdf& cdf, double gamma, double u_query,
                                   double u_correction) {
  check_uniform(u_query);
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("gamma must lie in [0, 1]");
  ActiveStat out{.value = 0.0,
                 .queried = false,
                 .query_prob = gamma,
                 .kind = StatKind::PValue,
                 .gamma_or_eta = gamma,
                 .uniform = u_query};
  if (u_query < gamma) {
    out.queried = true;
    out.value = checked_pvalue(oracle);
  } else {
    out.value = joint_corrected_pvalue(proxy_q, cdf, u_correction);
  }
  return out;
}

ActiveStat joint_corrected_mixture(double proxy_q, TrueStatOracle& oracle,
                                   const ConditionalCdf& cdf, double gamma, Rng& rng) {
  const double u_query = rng.uniform();
  const double u_correction = rng.uniform();
  return joint_corrected_mixture(proxy_q, oracle, cdf, gamma, u_query, u_correction);
}

}  // namespace active
