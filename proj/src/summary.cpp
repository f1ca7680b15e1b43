#include "evertest/summary.hpp"

#include <cmath>
#include <stdexcept>

namespace evertest {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of an empty sequence");
  double total = 0.0;
  for (double x : xs) total += x;
  return total / static_cast<double>(xs.size());
}

double standard_error(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double n = static_cast<double>(xs.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("correlation needs two equal sequences of length >= 2");
  }
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) throw std::invalid_argument("linspace needs at least one point");
  std::vector<double> out(count, lo);
  for (std::size_t i = 1; i < count; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  if (count > 1) out.back() = hi;
  return out;
}

std::vector<double> geomspace(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > 0.0)) throw std::invalid_argument("geomspace needs positive endpoints");
  auto logs = linspace(std::log(lo), std::log(hi), count);
  for (double& x : logs) x = std::exp(x);
  logs.front() = lo;
  if (count > 1) logs.back() = hi;
  return logs;
}

}  // namespace evertest
