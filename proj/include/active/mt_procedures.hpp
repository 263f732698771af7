#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "active/active_core.hpp"

namespace active {

struct StatVector {
  std::vector<double> values;
  StatKind kind = StatKind::PValue;
  std::vector<std::string> ids;  // empty means "1".."K"

  std::size_t size() const noexcept { return values.size(); }
  std::string id(std::size_t i) const;
};

StatVector make_pvalues(std::vector<double> values);
StatVector make_evalues(std::vector<double> values);

// Throws ParameterError for an empty vector, mismatched ids, or values outside
// the kind's domain.
void validate(const StatVector& stats);

// Rejected indices are 0-based and sorted ascending.
struct DiscoverySet {
  std::vector<std::size_t> rejected;
  std::size_t k_star = 0;
  double threshold = 0.0;  // 0 (p-values) or +inf (e-values) when k_star == 0
  double alpha = 0.0;
};

enum class DependenceRegime { IndependentOrPRDN, WNDN, Arbitrary };
enum class FdrProcedure { ActiveBH, PF };

std::string_view to_string(DependenceRegime regime);

// Maps proxies to a subset of [K].
using SelectionAlgorithm = std::function<std::vector<std::size_t>(const StatVector&)>;

// The m smallest p-values, or the m largest e-values; ties go to the lower
// index.
SelectionAlgorithm top_m_selector(std::size_t m);
SelectionAlgorithm select_all();
SelectionAlgorithm select_none();

struct ActiveResult {
  DiscoverySet discoveries;
  StatVector stats;  // the active statistics fed to BH / e-BH
  std::vector<bool> query_mask;
  std::vector<ActiveStat> details;
};

struct FilterResult {
  DiscoverySet discoveries;
  StatVector stats;
  std::vector<bool> query_mask;
};

// Critical values shared by the procedures and by is_self_consistent, so the
// comparisons agree bit for bit.
double bh_critical_value(double alpha, std::size_t k, std::size_t K);
double ebh_critical_value(double alpha, std::size_t k, std::size_t K);

DiscoverySet bh(const StatVector& pvals, double alpha);
DiscoverySet ebh(const StatVector& evals, double alpha);

// Hypothesis i draws its query uniform from hypothesis_rng(seed, i), so the
// result does not depend on `threads`.
ActiveResult active_bh(const StatVector& proxies, std::vector<TrueStatOracle>& oracles,
                       double gamma, double alpha, std::uint64_t seed, unsigned threads = 1);
ActiveResult active_ebh(const StatVector& proxies, std::vector<TrueStatOracle>& oracles,
                        double gamma, double alpha, std::uint64_t seed, unsigned threads = 1);

// Queries exactly the selected hypotheses; the rest are set to 1 (p-values)
// or 0 (e-values) before BH / e-BH.
FilterResult proxy_filter(const StatVector& proxies, std::vector<TrueStatOracle>& oracles,
                          const SelectionAlgorithm& selector, double alpha);
FilterResult e_proxy_filter(const StatVector& proxies, std::vector<TrueStatOracle>& oracles,
                            const SelectionAlgorithm& selector, double alpha);

bool is_self_consistent(const StatVector& stats, const std::vector<std::size_t>& rejected,
                        double alpha);

// Upper bound on the FDR of active BH / PF. Arbitrary dependence uses the
// harmonic number H_K as the correction factor.
double fdr_bound(double alpha, std::size_t K, DependenceRegime regime, FdrProcedure procedure);

double harmonic_number(std::size_t K);

// |N ∩ R| / max(|R|, 1).
double fdp(const std::vector<std::size_t>& rejected, const std::vector<std::size_t>& null_set);
// |N^c ∩ R| / max(|N^c|, 1) where `non_null` lists the alternatives.
double tdp(const std::vector<std::size_t>& rejected, const std::vector<std::size_t>& non_null);

}  // namespace active
