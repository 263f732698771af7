#include "active/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "active/error.hpp"
#include "active/normal.hpp"

namespace active {

namespace {

void check_margin(double delta) {
  if (!(delta >= 0.0 && delta < 0.5)) throw ParameterError("margin must lie in [0, 0.5)");
}

std::size_t locate(const std::vector<double>& edges, double q) {
  const auto it = std::upper_bound(edges.begin(), edges.end(), q);
  const auto j = static_cast<std::ptrdiff_t>(it - edges.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
      j, 0, static_cast<std::ptrdiff_t>(edges.size()) - 2));
}

std::vector<double> uniform_edges(std::size_t n) {
  std::vector<double> edges(n + 1);
  for (std::size_t j = 0; j <= n; ++j) edges[j] = static_cast<double>(j) / static_cast<double>(n);
  edges.back() = 1.0;
  return edges;
}

}  // namespace

std::size_t GridDensity::bin_of(double q) const { return locate(bin_edges, q); }

double GridDensity::eval(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("density evaluated outside [0, 1]");
  return bin_values[bin_of(q)];
}

double GridDensity::integral() const {
  double total = 0.0;
  for (std::size_t j = 0; j < bin_values.size(); ++j) {
    total += bin_values[j] * (bin_edges[j + 1] - bin_edges[j]);
  }
  return total;
}

NullDensity GridDensity::as_null_density(double margin) const {
  return NullDensity{[copy = *this](double q) { return copy.eval(q); },
                     density_lower_bound(*this, margin), margin};
}

GridDensity fit_null_density(const std::vector<double>& samples, std::size_t n_bins,
                             double floor_eps) {
  if (samples.size() < 50) {
    throw EstimationError("need at least 50 samples to fit a density, got " +
                          std::to_string(samples.size()));
  }
  if (n_bins < 2) throw ParameterError("need at least 2 bins");
  if (!(floor_eps > 0.0)) throw ParameterError("density floor must be positive");

  GridDensity out;
  out.bin_edges = uniform_edges(n_bins);
  std::vector<double> counts(n_bins, 0.0);
  for (double s : samples) {
    if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("density samples must lie in [0, 1]");
    counts[out.bin_of(s)] += 1.0;
  }
  const double n = static_cast<double>(samples.size());
  std::vector<double> raw(n_bins), width(n_bins);
  for (std::size_t j = 0; j < n_bins; ++j) {
    width[j] = out.bin_edges[j + 1] - out.bin_edges[j];
    raw[j] = counts[j] / (n * width[j]);
  }

  // Pin the floored bins at floor_eps and rescale the rest; repeat until no
  // rescaled bin falls below the floor.
  std::vector<bool> pinned(n_bins, false);
  double scale = 1.0;
  for (;;) {
    double pinned_mass = 0.0, free_mass = 0.0;
    for (std::size_t j = 0; j < n_bins; ++j) {
      (pinned[j] ? pinned_mass : free_mass) += (pinned[j] ? floor_eps : raw[j]) * width[j];
    }
    if (!(free_mass > 0.0) || !(pinned_mass < 1.0)) {
      throw EstimationError("density floor is too large for the number of bins");
    }
    scale = (1.0 - pinned_mass) / free_mass;
    bool changed = false;
    for (std::size_t j = 0; j < n_bins; ++j) {
      if (!pinned[j] && raw[j] * scale < floor_eps) {
        pinned[j] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  out.bin_values.resize(n_bins);
  for (std::size_t j = 0; j < n_bins; ++j) out.bin_values[j] = pinned[j] ? floor_eps : raw[j] * scale;
  return out;
}

double density_lower_bound(const GridDensity& density, double margin_delta) {
  check_margin(margin_delta);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < density.bin_values.size(); ++j) {
    const double a = density.bin_edges[j], b = density.bin_edges[j + 1];
    const bool last = j + 1 == density.bin_values.size();
    // [a, b) meets [delta, 1 - delta]
    if (a <= 1.0 - margin_delta && (b > margin_delta || (last && b >= margin_delta))) {
      lo = std::min(lo, density.bin_values[j]);
    }
  }
  if (!(lo > 0.0)) throw DomainError("density lower bound is not positive");
  return lo;
}

double density_lower_bound(const std::function<double(double)>& density, double margin_delta,
                           std::size_t grid_points) {
  check_margin(margin_delta);
  if (grid_points < 2) throw ParameterError("need at least 2 grid points");
  const double span = 1.0 - 2.0 * margin_delta;
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double q =
        margin_delta + span * static_cast<double>(k) / static_cast<double>(grid_points - 1);
    lo = std::min(lo, density(q));
  }
  if (!(lo > 0.0)) throw DomainError("density lower bound is not positive");
  return lo;
}

double gaussian_proxy_density(double q, double mu0, GaussianDensityForm form) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("Gaussian proxy density needs q in (0, 1)");
  // Phi^{-1}(1 - q) = -Phi^{-1}(q), which keeps precision for small q.
  const double x = -normal_quantile(q);
  // log of phi(x) / phi(x - mu0)
  const double log_ratio = -mu0 * x + 0.5 * mu0 * mu0;
  return std::exp(form == GaussianDensityForm::Reciprocal ? log_ratio : -log_ratio);
}

NullDensity gaussian_null_density(double mu0, GaussianDensityForm form, double margin) {
  auto f = [mu0, form](double q) {
    constexpr double lo = std::numeric_limits<double>::min();
    constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    return gaussian_proxy_density(std::clamp(q, lo, hi), mu0, form);
  };
  return NullDensity{f, density_lower_bound(f, margin), margin};
}

double beta_density(double q, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw ParameterError("Beta shapes must be positive");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("Beta density evaluated outside [0, 1]");
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  if ((q == 0.0 && a < 1.0) || (q == 1.0 && b < 1.0)) return std::numeric_limits<double>::infinity();
  const double lq = a == 1.0 ? 0.0 : (a - 1.0) * std::log(q);
  const double l1q = b == 1.0 ? 0.0 : (b - 1.0) * std::log1p(-q);
  return std::exp(log_norm + lq + l1q);
}

std::size_t CondCdfEstimate::bin_of(double q) const { return locate(q_bin_edges, q); }

double CondCdfEstimate::eval(double p, double q) const {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const auto& F = cdf[bin_of(q)];
  const std::size_t k = locate(p_grid, p);
  const double t = (p - p_grid[k]) / (p_grid[k + 1] - p_grid[k]);
  return F[k] + t * (F[k + 1] - F[k]);
}

double CondCdfEstimate::inverse(double u, double q) const {
  if (!(u >= 0.0 && u <= 1.0)) throw ParameterError("u must lie in [0, 1]");
  const auto& F = cdf[bin_of(q)];
  const auto it = std::lower_bound(F.begin(), F.end(), u);
  const auto k = static_cast<std::size_t>(it - F.begin());
  if (k == 0) return p_grid.front();
  if (k >= F.size()) return 1.0;
  // F[k-1] < u <= F[k]
  const double t = (u - F[k - 1]) / (F[k] - F[k - 1]);
  return p_grid[k - 1] + t * (p_grid[k] - p_grid[k - 1]);
}

ConditionalCdf CondCdfEstimate::as_conditional_cdf() const {
  return ConditionalCdf{[copy = *this](double p, double q) { return copy.eval(p, q); },
                        [copy = *this](double u, double q) { return copy.inverse(u, q); }};
}

CondCdfEstimate fit_conditional_cdf(const std::vector<std::pair<double, double>>& qp_pairs,
                                    std::size_t n_qbins, std::size_t p_grid_size,
                                    std::size_t min_per_bin) {
  if (p_grid_size < 2) throw ParameterError("p grid needs at least 2 points");
  if (min_per_bin == 0) throw ParameterError("min_per_bin must be positive");
  const std::size_t N = qp_pairs.size();
  if (N < min_per_bin) {
    throw EstimationError("need at least " + std::to_string(min_per_bin) +
                          " pairs to fit a conditional CDF, got " + std::to_string(N));
  }
  for (const auto& [q, p] : qp_pairs) {
    if (!(q >= 0.0 && q <= 1.0 && p >= 0.0 && p <= 1.0)) {
      throw ParameterError("conditional CDF pairs must lie in [0, 1]^2");
    }
  }
  if (n_qbins == 0) {
    n_qbins = std::min<std::size_t>(50, static_cast<std::size_t>(std::ceil(std::sqrt(double(N)))));
  }
  const auto fine = uniform_edges(n_qbins);
  std::vector<std::size_t> counts(n_qbins, 0);
  for (const auto& pr : qp_pairs) ++counts[locate(fine, pr.first)];

  // Greedy left-to-right merge; a short tail joins the last full group.
  std::vector<double> edges{0.0};
  std::vector<std::size_t> group_counts;
  std::size_t acc = 0;
  for (std::size_t j = 0; j < n_qbins; ++j) {
    acc += counts[j];
    if (acc >= min_per_bin) {
      edges.push_back(fine[j + 1]);
      group_counts.push_back(acc);
      acc = 0;
    }
  }
  if (acc > 0 || edges.back() < 1.0) {
    if (group_counts.empty()) throw EstimationError("not enough pairs after merging q bins");
    edges.back() = 1.0;
    group_counts.back() += acc;
  }

  CondCdfEstimate out;
  out.q_bin_edges = std::move(edges);
  out.p_grid = uniform_edges(p_grid_size - 1);
  const std::size_t groups = out.q_bin_edges.size() - 1;
  std::vector<std::vector<double>> members(groups);
  for (const auto& [q, p] : qp_pairs) members[locate(out.q_bin_edges, q)].push_back(p);

  out.cdf.assign(groups, std::vector<double>(p_grid_size));
  for (std::size_t g = 0; g < groups; ++g) {
    auto& ps = members[g];
    std::sort(ps.begin(), ps.end());
    const double n = static_cast<double>(ps.size());
    auto& F = out.cdf[g];
    for (std::size_t k = 0; k < p_grid_size; ++k) {
      const auto le = std::upper_bound(ps.begin(), ps.end(), out.p_grid[k]) - ps.begin();
      F[k] = static_cast<double>(le) / n;
    }
    F.front() = 0.0;
    F.back() = 1.0;
  }
  return out;
}

double inverse_conditional_cdf(const CondCdfEstimate& estimate, double q, double u) {
  return estimate.inverse(u, q);
}

}  // namespace active
