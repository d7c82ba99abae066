#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qagg {

// Standard normal density, CDF, and quantile function.
double norm_pdf(double x);
double norm_log_pdf(double x);
double norm_cdf(double x);
// Inverse of norm_cdf on (0,1); rational approximation plus one Halley
// refinement, accurate to ~1e-15. Throws std::invalid_argument outside (0,1).
double norm_quantile(double p);

// Lower empirical quantile: the ceil(tau*n)-th order statistic (1-indexed).
// This is the convention used everywhere outside the conformal module.
// `sorted` must be nondecreasing and nonempty; tau in (0,1).
double empirical_quantile_sorted(std::span<const double> sorted, double tau);
// Same, but sorts a copy of the input first.
double empirical_quantile(std::span<const double> values, double tau);

double mean(std::span<const double> v);
// Population standard deviation (divides by n).
double stddev(std::span<const double> v);

} // namespace qagg
