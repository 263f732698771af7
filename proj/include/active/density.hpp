#pragma once

// Null density of a proxy p-value on [0, 1] with a certified lower bound, and
// binned conditional CDFs F(p | q) for the joint correction.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "active/active_core.hpp"

namespace active {

inline constexpr double kDefaultDensityFloor = 1e-3;
inline constexpr double kDefaultMargin = 1e-3;

// Piecewise-constant density. Bin j covers [edges[j], edges[j+1]); the last
// bin also contains 1.
struct GridDensity {
  std::vector<double> bin_edges;
  std::vector<double> bin_values;

  std::size_t bin_of(double q) const;
  double eval(double q) const;
  double integral() const;
  NullDensity as_null_density(double margin = kDefaultMargin) const;
};

// Equal-width histogram; bins below floor_eps are raised to it and the
// remaining mass is rescaled so the total stays 1.
GridDensity fit_null_density(const std::vector<double>& samples, std::size_t n_bins = 20,
                             double floor_eps = kDefaultDensityFloor);

// Exact minimum over the bins meeting [delta, 1 - delta].
double density_lower_bound(const GridDensity& density, double margin_delta);

// Minimum over a uniform grid of `grid_points` on [delta, 1 - delta].
double density_lower_bound(const std::function<double(double)>& density, double margin_delta,
                           std::size_t grid_points = 10000);

// Two readings of the Gaussian proxy density, x = Phi^{-1}(1 - q).
// ChangeOfVariables is phi(x - mu0) / phi(x), the actual density of
// Q = 1 - Phi(X) for X ~ N(mu0, 1). Reciprocal is phi(x) / phi(x - mu0); it
// does not integrate to one and only exists for comparison.
enum class GaussianDensityForm { Reciprocal, ChangeOfVariables };

double gaussian_proxy_density(double q, double mu0,
                              GaussianDensityForm form = GaussianDensityForm::ChangeOfVariables);

// Density with its grid-certified lower bound on [margin, 1 - margin].
// q at or beyond the endpoints of (0, 1) is nudged inside so that extreme
// proxies evaluate instead of throwing.
NullDensity gaussian_null_density(double mu0, GaussianDensityForm form,
                                  double margin = kDefaultMargin);

// Beta(a, b) density, used for the Beta marginal study.
double beta_density(double q, double a, double b);

// Per-q-bin empirical CDFs of p on a uniform p grid, linearly interpolated.
struct CondCdfEstimate {
  std::vector<double> q_bin_edges;
  std::vector<double> p_grid;
  std::vector<std::vector<double>> cdf;  // cdf[bin][k] = F(p_grid[k] | bin)

  std::size_t bin_of(double q) const;
  double eval(double p, double q) const;
  // inf{p : F(p | q) >= u}, exact with respect to the interpolant.
  double inverse(double u, double q) const;
  ConditionalCdf as_conditional_cdf() const;
};

// n_qbins = 0 picks ceil(sqrt(N)) capped at 50. Bins with fewer than
// min_per_bin pairs are merged into a neighbour.
CondCdfEstimate fit_conditional_cdf(const std::vector<std::pair<double, double>>& qp_pairs,
                                    std::size_t n_qbins = 0, std::size_t p_grid_size = 201,
                                    std::size_t min_per_bin = 20);

double inverse_conditional_cdf(const CondCdfEstimate& estimate, double q, double u);

}  // namespace active
