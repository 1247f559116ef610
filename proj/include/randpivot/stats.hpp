#pragma once

#include <cstddef>
#include <vector>

namespace randpivot {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile (Wichura's AS 241, double precision).
/// Throws std::domain_error outside (0, 1).
double normal_quantile(double p);

/// Two-sided critical value z_{alpha/2}.
double z_alpha_half(double alpha);

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x); // divisor n
double median(std::vector<double> x);          // by copy; x need not be sorted

/// Kolmogorov-Smirnov sup distance between the empirical CDF of the sample
/// and the standard normal CDF. Sorts a copy.
double sup_distance_to_normal(std::vector<double> sample);

/// Slope of the least-squares line y = a + b x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace randpivot
