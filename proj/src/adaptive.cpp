#include "active/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "active/error.hpp"
#include "active/parallel.hpp"

namespace active {

namespace {

void check_samples(const MixtureSample& samples) {
  if (samples.empty()) throw ParameterError("mixture sample is empty");
  for (const auto& s : samples) {
    if (!(s.proxy >= 0.0) || !(s.truth >= 0.0)) {
      throw ParameterError("mixture sample entries must be nonnegative");
    }
  }
}

// w * log(x) with 0 * log(anything) = 0; -inf flags a positive weight on log 0.
double weighted_log(double w, double x) {
  if (w == 0.0) return 0.0;
  return w * std::log(x);
}

bool same_bits(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

MixtureSample from_pvalue_pairs(const std::vector<MixturePair>& qp) {
  MixtureSample out;
  out.reserve(qp.size());
  for (const auto& [q, p] : qp) {
    if (!(q >= 0.0 && q <= 1.0 && p >= 0.0 && p <= 1.0)) {
      throw ParameterError("p-value pairs must lie in [0, 1]");
    }
    out.push_back({1.0 / q, 1.0 / p});
  }
  return out;
}

double expected_log_objective(double gamma, const MixtureSample& samples) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("gamma must lie in (0, 1]");
  check_samples(samples);
  double total = 0.0;
  for (const auto& [f, e] : samples) {
    const double ratio = gamma / f;  // +inf at F = 0
    const double keep = std::min(ratio, 1.0);
    const double query = std::max(1.0 - ratio, 0.0);
    const double term = weighted_log(keep, f) + weighted_log(query, gamma * e);
    if (std::isinf(term) && term < 0.0) return kLogSentinel;
    total += term;
  }
  return total / static_cast<double>(samples.size());
}

double budget_usage(double gamma, const MixtureSample& samples) {
  check_samples(samples);
  double total = 0.0;
  for (const auto& s : samples) total += query_prob_evalue(s.proxy, gamma);
  return total / static_cast<double>(samples.size());
}

std::vector<double> gamma_grid(double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) throw ParameterError("grid step must lie in (0, 0.5]");
  std::vector<double> grid;
  for (std::size_t j = 1;; ++j) {
    const double g = static_cast<double>(j) * grid_step;
    if (g >= 1.0 - 1e-9) break;
    grid.push_back(g);
  }
  grid.push_back(1.0);
  return grid;
}

TuneResult tune_gamma(const MixtureSample& samples, double budget, double grid_step,
                      unsigned threads) {
  if (!(budget >= 0.0 && budget <= 1.0)) throw ParameterError("budget must lie in [0, 1]");
  check_samples(samples);
  const auto grid = gamma_grid(grid_step);
  std::vector<double> objective(grid.size()), usage(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t j) {
    objective[j] = expected_log_objective(grid[j], samples);
    usage[j] = budget_usage(grid[j], samples);
  });

  TuneResult best;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (usage[j] > budget) continue;
    // >= so that a later (larger) gamma wins ties
    if (!best.feasible || objective[j] >= best.objective) {
      best = {grid[j], objective[j], usage[j], true};
    }
  }
  if (!best.feasible) {
    best.gamma = 1.0;
    best.objective = objective.back();
    best.usage = usage.back();
  }
  return best;
}

double eta_for_budget(double budget, double ell_f) {
  if (!(budget >= 0.0 && budget <= 1.0)) throw ParameterError("budget must lie in [0, 1]");
  if (!(ell_f > 0.0)) throw ParameterError("density lower bound must be positive");
  if (budget < 1.0 - ell_f - 1e-12) {
    throw ParameterError("budget " + std::to_string(budget) +
                         " is below the minimum expected query rate 1 - l_f = " +
                         std::to_string(1.0 - ell_f));
  }
  return std::clamp((1.0 - budget) / ell_f, 0.0, 1.0);
}

StoppingRule stop_after(std::size_t t) {
  return {[t](std::size_t i, const std::vector<std::vector<double>>& history) {
    return history[i].size() >= t;
  }};
}

MultilevelResult multilevel_active_evalues(std::vector<IterateGenerator>& generators,
                                           const StoppingRule& stopping,
                                           std::vector<TrueStatOracle>& oracles, double gamma,
                                           std::uint64_t seed, std::size_t max_iterations) {
  const std::size_t K = generators.size();
  if (K == 0) throw ParameterError("no hypotheses");
  if (oracles.size() != K) throw ParameterError("expected one oracle per hypothesis");
  if (max_iterations == 0) throw ParameterError("max_iterations must be positive");
  if (!stopping.decide) throw ConfigurationError("stopping rule is empty");

  std::vector<std::vector<double>> history(K);
  std::vector<bool> stopped(K, false);
  MultilevelResult out;
  out.frozen_proxies.assign(K, 0.0);
  out.stop_times.assign(K, 0);

  std::size_t remaining = K;
  for (std::size_t t = 1; remaining > 0; ++t) {
    for (std::size_t i = 0; i < K; ++i) {
      if (stopped[i]) continue;
      const auto next = generators[i]();
      if (!next) {
        throw ConfigurationError("iterate generator for hypothesis " + std::to_string(i + 1) +
                                 " was exhausted before its stopping time");
      }
      if (!(*next >= 0.0)) throw DomainError("proxy iterate must be nonnegative");
      history[i].push_back(*next);
      if (t >= max_iterations || stopping.decide(i, history)) {
        stopped[i] = true;
        out.frozen_proxies[i] = *next;
        out.stop_times[i] = t;
        --remaining;
      }
    }
  }

  out.stats.reserve(K);
  for (std::size_t i = 0; i < K; ++i) {
    Rng rng = hypothesis_rng(seed, i);
    out.stats.push_back(active_evalue(out.frozen_proxies[i], oracles[i], gamma, rng));
  }
  return out;
}

Chooser in_order(std::vector<std::size_t> permutation) {
  return [perm = std::move(permutation)](const std::vector<double>&,
                                         const std::vector<bool>& processed) {
    const auto done = static_cast<std::size_t>(std::count(processed.begin(), processed.end(), true));
    if (done >= perm.size()) throw ConfigurationError("processing order is shorter than K");
    return perm[done];
  };
}

UpdateRule identity_update() {
  return [](const std::vector<double>& proxies, const std::vector<bool>&, const std::vector<bool>&,
            const std::vector<double>&) { return proxies; };
}

InteractiveResult interactive_active_evalues(const StatVector& initial_proxies,
                                             const Chooser& chooser, const UpdateRule& update,
                                             std::vector<TrueStatOracle>& oracles, double gamma,
                                             std::uint64_t seed) {
  validate(initial_proxies);
  if (initial_proxies.kind != StatKind::EValue) throw ParameterError("proxies must be e-values");
  const std::size_t K = initial_proxies.size();
  if (oracles.size() != K) throw ParameterError("expected one oracle per hypothesis");

  std::vector<double> proxies = initial_proxies.values;
  std::vector<bool> processed(K, false), queried(K, false);
  std::vector<double> revealed(K, std::numeric_limits<double>::quiet_NaN());

  InteractiveResult out;
  out.stats.resize(K);
  out.used_proxies.assign(K, 0.0);
  out.order.reserve(K);

  for (std::size_t step = 0; step < K; ++step) {
    const std::size_t i = chooser(proxies, processed);
    if (i >= K || processed[i]) {
      throw ConfigurationError("chooser picked index " + std::to_string(i) +
                               ", which is out of range or already processed");
    }
    double raw = std::numeric_limits<double>::quiet_NaN();
    TrueStatOracle tap([&] {
      raw = oracles[i].query();
      return raw;
    });
    Rng rng = hypothesis_rng(seed, i);
    out.stats[i] = active_evalue(proxies[i], tap, gamma, rng);
    out.used_proxies[i] = proxies[i];
    out.order.push_back(i);
    processed[i] = true;
    if (out.stats[i].queried) {
      queried[i] = true;
      revealed[i] = raw;
    }
    if (step + 1 == K) break;

    auto revised = update(proxies, processed, queried, revealed);
    if (revised.size() != K) throw ConfigurationError("update rule changed the number of proxies");
    for (std::size_t j = 0; j < K; ++j) {
      if (processed[j] && !same_bits(revised[j], proxies[j])) {
        throw ConfigurationError("update rule modified the proxy of processed hypothesis " +
                                 std::to_string(j + 1));
      }
      if (!processed[j] && !(revised[j] >= 0.0)) {
        throw DomainError("update rule produced a negative or NaN proxy");
      }
    }
    proxies = std::move(revised);
  }
  return out;
}

}  // namespace active
