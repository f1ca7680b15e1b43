#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace evertest {

double mean(std::span<const double> xs);
/// Sample standard deviation over sqrt(n); 0 for fewer than two values.
double standard_error(std::span<const double> xs);
double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

/// `count` points from lo to hi inclusive, evenly spaced.
std::vector<double> linspace(double lo, double hi, std::size_t count);
/// `count` points from lo to hi inclusive, evenly spaced in log scale.
std::vector<double> geomspace(double lo, double hi, std::size_t count);

}  // namespace evertest
