#pragma once

// Standard normal and Student-t distribution functions.

namespace active {

double normal_pdf(double x);

// Phi(x) through the complementary error function; accurate in both tails.
double normal_cdf(double x);

// 1 - Phi(x) without cancellation for large x.
double normal_sf(double x);

// Phi^{-1}(p): rational approximation refined by one Halley step.
// Returns -inf / +inf at p = 0 / p = 1; throws DomainError outside [0, 1].
double normal_quantile(double p);

// Student-t CDF with `df` degrees of freedom.
double student_t_cdf(double t, double df);

}  // namespace active
