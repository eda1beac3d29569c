#pragma once

#include <functional>
#include <span>

namespace ddk {

double log_beta(double a, double b);

// I_x(a, b), the regularized incomplete beta function, for a, b > 0.
// Continued-fraction evaluation; absolute error below 1e-12 for the
// parameter ranges used by the outlier tests (a, b up to ~1e4).
double regularized_incomplete_beta(double a, double b, double x);

// CDF and survival function of the F distribution with (d1, d2) degrees of
// freedom. The survival function is evaluated directly, without 1 - cdf.
double f_distribution_cdf(double t, double d1, double d2);
double f_distribution_sf(double t, double d1, double d2);

double normal_cdf(double x);

// Kolmogorov limiting survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

// One-sample KS statistic of `sorted` (ascending) against `cdf`.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

// Asymptotic p-value of a one-sample KS statistic with Stephens' small-sample
// correction.
double ks_pvalue(double d, std::size_t n);

}  // namespace ddk
