#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace active {

// Pairwise summation; the result depends only on the order of `x`.
double pairwise_sum(const std::vector<double>& x);
double mean(const std::vector<double>& x);
// Standard error of the mean (sample sd / sqrt(n)); 0 for n < 2.
double standard_error(const std::vector<double>& x);
// sqrt(p (1 - p) / n).
double binomial_se(double p, std::size_t n);

// One-sample two-sided KS statistic sup |F_n - F|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& reference_cdf);
double ks_uniform(const std::vector<double>& samples);
// 95% asymptotic band 1.36 / sqrt(n).
double ks_band(std::size_t n);

// Fraction of samples <= g for each g in grid.
std::vector<double> empirical_cdf(std::vector<double> samples, const std::vector<double>& grid);

// max_g (F_n(g) - g) over the grid; positive values mean mass above uniform.
double max_excess_over_uniform(const std::vector<double>& samples, const std::vector<double>& grid);

// Evenly spaced points (1..n)/n.
std::vector<double> uniform_grid(std::size_t n);

// 1-based ranks, ties get the average rank.
std::vector<double> midranks(const std::vector<double>& x);
double pearson(const std::vector<double>& x, const std::vector<double>& y);
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace active
