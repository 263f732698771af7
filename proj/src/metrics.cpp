#include "active/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "active/error.hpp"

namespace active {

namespace {

double pairwise(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise(x, h) + pairwise(x + h, n - h);
}

}  // namespace

double pairwise_sum(const std::vector<double>& x) { return pairwise(x.data(), x.size()); }

double mean(const std::vector<double>& x) {
  if (x.empty()) throw ParameterError("mean of an empty sample");
  return pairwise_sum(x) / static_cast<double>(x.size());
}

double standard_error(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - m) * (x[i] - m);
  const double var = pairwise_sum(sq) / static_cast<double>(x.size() - 1);
  return std::sqrt(var / static_cast<double>(x.size()));
}

double binomial_se(double p, std::size_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& reference_cdf) {
  if (samples.empty()) throw ParameterError("KS statistic of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = reference_cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

double ks_uniform(const std::vector<double>& samples) {
  return ks_statistic(samples, [](double x) { return std::clamp(x, 0.0, 1.0); });
}

double ks_band(std::size_t n) { return 1.36 / std::sqrt(static_cast<double>(n)); }

std::vector<double> empirical_cdf(std::vector<double> samples, const std::vector<double>& grid) {
  if (samples.empty()) throw ParameterError("empirical CDF of an empty sample");
  std::sort(samples.begin(), samples.end());
  std::vector<double> out(grid.size());
  const double n = static_cast<double>(samples.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto le = std::upper_bound(samples.begin(), samples.end(), grid[k]) - samples.begin();
    out[k] = static_cast<double>(le) / n;
  }
  return out;
}

double max_excess_over_uniform(const std::vector<double>& samples, const std::vector<double>& grid) {
  const auto F = empirical_cdf(samples, grid);
  double worst = -1.0;
  for (std::size_t k = 0; k < grid.size(); ++k) worst = std::max(worst, F[k] - grid[k]);
  return worst;
}

std::vector<double> uniform_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = static_cast<double>(k + 1) / static_cast<double>(n);
  return g;
}

std::vector<double> midranks(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("pearson needs two equal samples of size >= 2");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(midranks(x), midranks(y));
}

}  // namespace active
