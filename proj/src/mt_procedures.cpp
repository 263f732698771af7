#include "active/mt_procedures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "active/error.hpp"
#include "active/parallel.hpp"

namespace active {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
}

void check_oracles(const StatVector& proxies, const std::vector<TrueStatOracle>& oracles) {
  if (oracles.size() != proxies.size()) {
    throw ParameterError("expected one oracle per hypothesis, got " +
                         std::to_string(oracles.size()) + " for " +
                         std::to_string(proxies.size()));
  }
}

// Stable order: most significant first, ties by index.
std::vector<std::size_t> significance_order(const StatVector& stats) {
  std::vector<std::size_t> order(stats.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& v = stats.values;
  if (stats.kind == StatKind::PValue) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  }
  return order;
}

DiscoverySet step_up(const StatVector& stats, double alpha) {
  validate(stats);
  check_alpha(alpha);
  const std::size_t K = stats.size();
  const bool pv = stats.kind == StatKind::PValue;
  const auto order = significance_order(stats);

  std::size_t k_star = 0;
  for (std::size_t k = K; k >= 1; --k) {
    const double x = stats.values[order[k - 1]];
    const bool passes =
        pv ? x <= bh_critical_value(alpha, k, K) : x >= ebh_critical_value(alpha, k, K);
    if (passes) {
      k_star = k;
      break;
    }
  }

  DiscoverySet out;
  out.alpha = alpha;
  out.k_star = k_star;
  if (k_star == 0) {
    out.threshold = pv ? 0.0 : std::numeric_limits<double>::infinity();
    return out;
  }
  out.threshold = pv ? bh_critical_value(alpha, k_star, K) : ebh_critical_value(alpha, k_star, K);
  for (std::size_t i = 0; i < K; ++i) {
    const double x = stats.values[i];
    if (pv ? x <= out.threshold : x >= out.threshold) out.rejected.push_back(i);
  }
  return out;
}

template <class Construct>
ActiveResult run_active(const StatVector& proxies, std::vector<TrueStatOracle>& oracles,
                        StatKind kind, double alpha, std::uint64_t seed, unsigned threads,
                        Construct&& construct) {
  validate(proxies);
  if (proxies.kind != kind) throw ParameterError("proxy statistics have the wrong kind");
  check_oracles(proxies, oracles);
  check_alpha(alpha);

  const std::size_t K = proxies.size();
  ActiveResult out;
  out.details.resize(K);
  parallel_for(K, threads, [&](std::size_t i) {
    Rng rng = hypothesis_rng(seed, i);
    out.details[i] = construct(proxies.values[i], oracles[i], rng);
  });

  out.stats.kind = kind;
  out.stats.ids = proxies.ids;
  out.stats.values.reserve(K);
  out.query_mask.reserve(K);
  for (const auto& d : out.details) {
    out.stats.values.push_back(d.value);
    out.query_mask.push_back(d.queried);
  }
  out.discoveries = kind == StatKind::PValue ? bh(out.stats, alpha) : ebh(out.stats, alpha);
  return out;
}

FilterResult run_filter(const StatVector& proxies, std::vector<TrueStatOracle>& oracles,
                        const SelectionAlgorithm& selector, double alpha, StatKind kind) {
  validate(proxies);
  if (proxies.kind != kind) throw ParameterError("proxy statistics have the wrong kind");
  check_oracles(proxies, oracles);
  check_alpha(alpha);

  const std::size_t K = proxies.size();
  const double fill = kind == StatKind::PValue ? 1.0 : 0.0;
  FilterResult out;
  out.stats.kind = kind;
  out.stats.ids = proxies.ids;
  out.stats.values.assign(K, fill);
  out.query_mask.assign(K, false);

  for (std::size_t i : selector(proxies)) {
    if (i >= K) throw ParameterError("selector returned index " + std::to_string(i) + " >= K");
    if (out.query_mask[i]) continue;
    out.query_mask[i] = true;
    const double v = oracles[i].query();
    if (!in_domain(kind, v)) {
      throw DomainError("true " + std::string(to_string(kind)) + " for hypothesis " +
                        proxies.id(i) + " is outside its domain");
    }
    out.stats.values[i] = v;
  }
  out.discoveries = kind == StatKind::PValue ? bh(out.stats, alpha) : ebh(out.stats, alpha);
  return out;
}

}  // namespace

std::string StatVector::id(std::size_t i) const {
  return ids.empty() ? std::to_string(i + 1) : ids.at(i);
}

StatVector make_pvalues(std::vector<double> values) {
  return StatVector{std::move(values), StatKind::PValue, {}};
}

StatVector make_evalues(std::vector<double> values) {
  return StatVector{std::move(values), StatKind::EValue, {}};
}

void validate(const StatVector& stats) {
  if (stats.values.empty()) throw ParameterError("statistic vector is empty");
  if (!stats.ids.empty() && stats.ids.size() != stats.values.size()) {
    throw ParameterError("ids and values differ in length");
  }
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (!in_domain(stats.kind, stats.values[i])) {
      throw ParameterError(std::string(to_string(stats.kind)) + " for hypothesis " + stats.id(i) +
                           " is outside its domain");
    }
  }
}

std::string_view to_string(DependenceRegime regime) {
  switch (regime) {
    case DependenceRegime::IndependentOrPRDN:
      return "independent-or-prdn";
    case DependenceRegime::WNDN:
      return "wndn";
    case DependenceRegime::Arbitrary:
      return "arbitrary";
  }
  return "unknown";
}

SelectionAlgorithm top_m_selector(std::size_t m) {
  return [m](const StatVector& proxies) {
    auto order = significance_order(proxies);
    order.resize(std::min(m, order.size()));
    std::sort(order.begin(), order.end());
    return order;
  };
}

SelectionAlgorithm select_all() {
  return [](const StatVector& proxies) {
    std::vector<std::size_t> all(proxies.size());
    std::iota(all.begin(), all.end(), 0);
    return all;
  };
}

SelectionAlgorithm select_none() {
  return [](const StatVector&) { return std::vector<std::size_t>{}; };
}

double bh_critical_value(double alpha, std::size_t k, std::size_t K) {
  return alpha * static_cast<double>(k) / static_cast<double>(K);
}

double ebh_critical_value(double alpha, std::size_t k, std::size_t K) {
  return static_cast<double>(K) / (alpha * static_cast<double>(k));
}

DiscoverySet bh(const StatVector& pvals, double alpha) {
  if (pvals.kind != StatKind::PValue) throw ParameterError("bh expects p-values");
  return step_up(pvals, alpha);
}

DiscoverySet ebh(const StatVector& evals, double alpha) {
  if (evals.kind != StatKind::EValue) throw ParameterError("ebh expects e-values");
  return step_up(evals, alpha);
}

ActiveResult active_bh(const StatVector& proxies, std::vector<TrueStatOracle>& oracles,
                       double gamma, double alpha, std::uint64_t seed, unsigned threads) {
  return run_active(proxies, oracles, StatKind::PValue, alpha, seed, threads,
                    [gamma](double q, TrueStatOracle& o, Rng& rng) {
                      return active_pvalue_arbdep(q, o, gamma, rng);
                    });
}

ActiveResult active_ebh(const StatVector& proxies, std::vector<TrueStatOracle>& oracles,
                        double gamma, double alpha, std::uint64_t seed, unsigned threads) {
  return run_active(proxies, oracles, StatKind::EValue, alpha, seed, threads,
                    [gamma](double f, TrueStatOracle& o, Rng& rng) {
                      return active_evalue(f, o, gamma, rng);
                    });
}

FilterResult proxy_filter(const StatVector& proxies, std::vector<TrueStatOracle>& oracles,
                          const SelectionAlgorithm& selector, double alpha) {
  return run_filter(proxies, oracles, selector, alpha, StatKind::PValue);
}

FilterResult e_proxy_filter(const StatVector& proxies, std::vector<TrueStatOracle>& oracles,
                            const SelectionAlgorithm& selector, double alpha) {
  return run_filter(proxies, oracles, selector, alpha, StatKind::EValue);
}

bool is_self_consistent(const StatVector& stats, const std::vector<std::size_t>& rejected,
                        double alpha) {
  validate(stats);
  check_alpha(alpha);
  std::unordered_set<std::size_t> seen;
  for (std::size_t i : rejected) {
    if (i >= stats.size()) throw ParameterError("rejected index out of range");
    if (!seen.insert(i).second) throw ParameterError("rejected set contains a duplicate");
  }
  if (rejected.empty()) return true;
  const std::size_t K = stats.size();
  const std::size_t r = rejected.size();
  for (std::size_t i : rejected) {
    const double x = stats.values[i];
    if (stats.kind == StatKind::PValue ? !(x <= bh_critical_value(alpha, r, K))
                                       : !(x >= ebh_critical_value(alpha, r, K))) {
      return false;
    }
  }
  return true;
}

double harmonic_number(std::size_t K) {
  double h = 0.0;
  for (std::size_t i = K; i >= 1; --i) h += 1.0 / static_cast<double>(i);  // small terms first
  return h;
}

double fdr_bound(double alpha, std::size_t K, DependenceRegime regime, FdrProcedure) {
  check_alpha(alpha);
  if (K == 0) throw ParameterError("K must be positive");
  // Active BH and PF share the same bounds.
  switch (regime) {
    case DependenceRegime::IndependentOrPRDN:
      return alpha * (1.0 + std::log(1.0 / alpha));
    case DependenceRegime::WNDN:
      return alpha * (3.18 + std::log(1.0 / alpha));
    case DependenceRegime::Arbitrary:
      return alpha * harmonic_number(K);
  }
  return 1.0;
}

double fdp(const std::vector<std::size_t>& rejected, const std::vector<std::size_t>& null_set) {
  if (rejected.empty()) return 0.0;
  const std::unordered_set<std::size_t> nulls(null_set.begin(), null_set.end());
  std::size_t false_rejections = 0;
  for (std::size_t i : rejected) false_rejections += nulls.count(i);
  return static_cast<double>(false_rejections) / static_cast<double>(rejected.size());
}

double tdp(const std::vector<std::size_t>& rejected, const std::vector<std::size_t>& non_null) {
  if (non_null.empty()) return 0.0;
  const std::unordered_set<std::size_t> alts(non_null.begin(), non_null.end());
  std::size_t hits = 0;
  for (std::size_t i : rejected) hits += alts.count(i);
  return static_cast<double>(hits) / static_cast<double>(non_null.size());
}

}  // namespace active
