#pragma once

// Single-hypothesis active statistics: a cheap proxy is combined with an
// expensive true statistic that is computed only with a proxy-dependent
// probability, and the result is a valid p-value or e-value.
//
// Randomness convention: every construction is driven by one uniform draw
// u in [0, 1) and queries the true statistic iff u < query_prob. Each
// operation has an overload taking u directly (for coupling arguments and
// hand-traced tests) and one drawing u from an Rng; the draw is recorded in
// ActiveStat::uniform either way.

#include <cstddef>
#include <functional>
#include <string_view>

#include "active/random.hpp"

namespace active {

enum class StatKind { PValue, EValue };

std::string_view to_string(StatKind kind);

// PValue: [0, 1]. EValue: [0, inf).
bool in_domain(StatKind kind, double value);

// Deferred computation of the true statistic with a query tally. One oracle
// belongs to one hypothesis, so the counter needs no synchronization.
class TrueStatOracle {
 public:
  using Query = std::function<double()>;

  TrueStatOracle() = default;
  explicit TrueStatOracle(Query query) : query_(std::move(query)) {}

  static TrueStatOracle constant(double value) {
    return TrueStatOracle([value] { return value; });
  }

  // Runs the computation; the count is incremented before the call, so a
  // failing computation still counts as a query attempt.
  double query();
  std::size_t query_count() const noexcept { return count_; }
  bool available() const noexcept { return static_cast<bool>(query_); }

 private:
  Query query_;
  std::size_t count_ = 0;
};

struct ActiveStat {
  double value = 0.0;
  bool queried = false;
  double query_prob = 0.0;
  StatKind kind = StatKind::PValue;
  double gamma_or_eta = 0.0;
  double uniform = 0.0;  // draw that decided `queried`
};

// Null density of a proxy p-value with a lower bound certified over
// [domain_margin, 1 - domain_margin].
struct NullDensity {
  std::function<double(double)> eval;
  double lower_bound = 0.0;
  double domain_margin = 0.0;

  bool certified_at(double q) const { return q >= domain_margin && q <= 1.0 - domain_margin; }
};

// F(p | q) = P(P <= p | Q = q) and its generalized inverse in p.
struct ConditionalCdf {
  std::function<double(double p, double q)> eval;
  std::function<double(double u, double q)> inverse;
};

// Bernoulli parameters computed in floating point are clamped into [0, 1]
// once they are within this distance of the interval.
inline constexpr double kProbabilityTolerance = 1e-12;

// (1 - gamma / F)_+ with the F = 0 convention giving 0.
double query_prob_evalue(double proxy_f, double gamma);

// 1 - gamma * Q.
double query_prob_arbdep(double proxy_q, double gamma);

// 1 - eta * l_f / f(Q). Inside the certified interval f(Q) < eta * l_f throws
// InconsistentDensityError; outside it such a Q is always queried.
double query_prob_density(double proxy_q, const NullDensity& density, double eta);

// (1 - T) F + T (1 - gamma) E.
ActiveStat active_evalue(double proxy_f, TrueStatOracle& oracle, double gamma, double u);
ActiveStat active_evalue(double proxy_f, TrueStatOracle& oracle, double gamma, Rng& rng);

// (1 - T) Q + T min((1 - gamma)^{-1} P, 1), T ~ Bern(1 - gamma Q).
ActiveStat active_pvalue_arbdep(double proxy_q, TrueStatOracle& oracle, double gamma, double u);
ActiveStat active_pvalue_arbdep(double proxy_q, TrueStatOracle& oracle, double gamma, Rng& rng);

// (1 - T) Q + T P, T ~ Bern(1 - eta l_f / f(Q)). Exactly uniform when P is
// uniform and independent of Q.
ActiveStat active_pvalue_density(double proxy_q, TrueStatOracle& oracle,
                                 const NullDensity& density, double eta, double u);
ActiveStat active_pvalue_density(double proxy_q, TrueStatOracle& oracle,
                                 const NullDensity& density, double eta, Rng& rng);

// Stochastic-rounding boost: the queried branch is divided by the query
// probability, (1 - T) F + T (1 - gamma) / (1 - gamma/F)_+ E. Dominates
// active_evalue pointwise when both use the same u.
ActiveStat sr_active_evalue(double proxy_f, TrueStatOracle& oracle, double gamma, double u);
ActiveStat sr_active_evalue(double proxy_f, TrueStatOracle& oracle, double gamma, Rng& rng);

// min((1 - gamma)^{-1} P, u / gamma, 1): superuniform lower bound of the
// arbitrary-dependence active p-value. To couple it with
// active_pvalue_arbdep driven by draw u, pass 1 - u here: the query event
// u < 1 - gamma Q is then exactly (1 - u) / gamma > Q.
double coupled_lowerbound_pvalue(double true_p, double gamma, double uniform_u);

// F^{-1}(u | Q).
double joint_corrected_pvalue(double proxy_q, const ConditionalCdf& cdf, double u);
double joint_corrected_pvalue(double proxy_q, const ConditionalCdf& cdf, Rng& rng);

// (1 - T) F^{-1}(U | Q) + T P with T ~ Bern(gamma) independent of Q.
// `u_query` decides T, `u_correction` feeds the inverse CDF.
ActiveStat joint_corrected_mixture(double proxy_q, TrueStatOracle& oracle,
                                   const ConditionalCdf& cdf, double gamma, double u_query,
                                   double u_correction);
ActiveStat joint_corrected_mixture(double proxy_q, TrueStatOracle& oracle,
                                   const ConditionalCdf& cdf, double gamma, Rng& rng);

}  // namespace active
