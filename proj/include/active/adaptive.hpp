#pragma once

// Tuning of gamma / eta against a query budget, and the two sequential
// querying strategies (multilevel proxies with stopping rules, and
// interactive proxies revised after each revealed true e-value).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "active/active_core.hpp"
#include "active/mt_procedures.hpp"

namespace active {

struct MixturePair {
  double proxy = 0.0;  // F
  double truth = 0.0;  // E
};
using MixtureSample = std::vector<MixturePair>;

// F = 1/Q, E = 1/P, so tuning can run on p-value pairs unchanged.
MixtureSample from_pvalue_pairs(const std::vector<MixturePair>& qp);

// Returned by expected_log_objective when a positively weighted term is
// log 0, keeping the grid search total.
inline constexpr double kLogSentinel = std::numeric_limits<double>::lowest();

// Mean of min(gamma/F, 1) log F + (1 - gamma/F)_+ log(gamma E).
double expected_log_objective(double gamma, const MixtureSample& samples);

// Mean of (1 - gamma/F)_+, the expected query fraction.
double budget_usage(double gamma, const MixtureSample& samples);

struct TuneResult {
  double gamma = 1.0;
  double objective = kLogSentinel;
  double usage = 0.0;
  bool feasible = false;
};

// Grid {step, 2 step, ..., 1}. Maximizes the objective subject to usage <= B,
// ties toward larger gamma. When no grid point is feasible returns gamma = 1
// with feasible = false.
TuneResult tune_gamma(const MixtureSample& samples, double budget, double grid_step = 0.01,
                      unsigned threads = 1);

std::vector<double> gamma_grid(double grid_step);

// eta = min(1, (1 - B) / l_f); throws ParameterError when B < 1 - l_f.
double eta_for_budget(double budget, double ell_f);

// ---- multilevel ----

// Yields the next proxy iterate, or nullopt when exhausted.
using IterateGenerator = std::function<std::optional<double>()>;

// decide(i, history) is asked right after hypothesis i receives a new
// iterate; history[j] holds every iterate seen so far for hypothesis j, so
// rules may peek across hypotheses. Returning true stops i for good.
struct StoppingRule {
  std::function<bool(std::size_t, const std::vector<std::vector<double>>&)> decide;
};

StoppingRule stop_after(std::size_t t);

struct MultilevelResult {
  std::vector<ActiveStat> stats;
  std::vector<double> frozen_proxies;
  std::vector<std::size_t> stop_times;  // 1-based iteration count
};

// Round-robin over hypotheses until every one has stopped (forced at
// max_iterations), then one active e-value draw per hypothesis with the
// frozen proxy, using hypothesis_rng(seed, i).
MultilevelResult multilevel_active_evalues(std::vector<IterateGenerator>& generators,
                                           const StoppingRule& stopping,
                                           std::vector<TrueStatOracle>& oracles, double gamma,
                                           std::uint64_t seed, std::size_t max_iterations = 100);

// ---- interactive ----

// Picks the next hypothesis; must return an unprocessed index.
using Chooser =
    std::function<std::size_t(const std::vector<double>& proxies, const std::vector<bool>& processed)>;

Chooser in_order(std::vector<std::size_t> permutation);

// Returns the revised proxy vector. `revealed` holds the raw true e-value for
// queried hypotheses and NaN elsewhere. Entries of processed hypotheses must
// come back unchanged.
using UpdateRule = std::function<std::vector<double>(
    const std::vector<double>& proxies, const std::vector<bool>& processed,
    const std::vector<bool>& queried, const std::vector<double>& revealed)>;

UpdateRule identity_update();

struct InteractiveResult {
  std::vector<ActiveStat> stats;        // indexed by hypothesis
  std::vector<std::size_t> order;       // processing order
  std::vector<double> used_proxies;     // proxy in force when each was processed
};

InteractiveResult interactive_active_evalues(const StatVector& initial_proxies,
                                             const Chooser& chooser, const UpdateRule& update,
                                             std::vector<TrueStatOracle>& oracles, double gamma,
                                             std::uint64_t seed);

}  // namespace active
