#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "evertest/core_stats.hpp"

namespace evertest {

/// E[tau] <= max{n0, n1, 32 ln(1/alpha) / delta^2} + (L+2) pi^2 / 6.
struct TauBoundReport {
  std::uint64_t n0 = 1;
  std::uint64_t n1 = 1;
  double alpha_term = 0.0;
  double constant = 0.0;
  double total = 0.0;
};

TauBoundReport tau_upper_bound(double alpha, double delta, std::uint64_t num_alternatives);

/// Smallest m >= 1 with f(n) <= level for every n >= m, for f unimodal on the integers
/// (rising then strictly falling). Scans past the maximum, then bisects the falling side.
std::uint64_t first_index_holding_after_peak(const std::function<double(double)>& f, double level);

/// sqrt(8 ln(2 n^3) / n), compared against delta/2.
double concentration_radius(double n);
/// 2 ln(n) / n, compared against delta^2/32.
double regret_rate(double n);

/// ln(1/alpha) / min off-diagonal J; `pairwise_j` is square and symmetric in role.
double min_training_size(double alpha, const Eigen::MatrixXd& pairwise_j);

/// KL: (min gap)^2 / 2; TV: (min gap) / 2.
double mismatch_tolerance(const GapReport& report, Divergence metric);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Envelope [Delta_theta - s, Delta_theta + s] per theta with s = sqrt(2 eps) (KL)
/// or 2 eps (TV). The lower end is clamped at 0 (the true lower bound is strict).
std::vector<Interval> tilde_delta_envelope(const GapReport& report, double eps, Divergence metric);

double vc_sample_size(double gamma, double d, std::uint64_t num_alternatives, double delta);

/// Lower bound on log Psi; every environment constant is caller-supplied.
double minimax_log_psi_lower(double n, double alpha, double max_kl, double capacity_b,
                             double train_n, double kl_curvature_m,
                             std::uint64_t num_alternatives, double delta_param);

/// ln(1/alpha) / KL(post || pre): an order-level reference line for detection delay.
double lorden_delay_lower(double alpha, const LabelPmf& post_row, const LabelPmf& pre_row);

struct QuadraticFit {
  double c = 0.0;
  /// (alpha, c ln(1/alpha) / delta^2) on a geometric grid containing the input alphas.
  std::vector<std::pair<double, double>> curve;
};

QuadraticFit quadratic_fit(const std::vector<double>& alphas, const std::vector<double>& mean_taus,
                           double delta, std::size_t fine_grid = 1000);

}  // namespace evertest
