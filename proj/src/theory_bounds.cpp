#include "evertest/theory_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "evertest/summary.hpp"

namespace evertest {

double concentration_radius(double n) { return std::sqrt(8.0 * std::log(2.0 * n * n * n) / n); }

double regret_rate(double n) { return 2.0 * std::log(n) / n; }

std::uint64_t first_index_holding_after_peak(const std::function<double(double)>& f,
                                             double level) {
  std::uint64_t peak = 1;
  while (f(static_cast<double>(peak + 1)) > f(static_cast<double>(peak))) ++peak;
  if (f(static_cast<double>(peak)) <= level) return 1;

  // f strictly decreases past the peak: bracket the first n with f(n) <= level.
  std::uint64_t fail = peak;
  std::uint64_t hold = peak + 1;
  while (f(static_cast<double>(hold)) > level) {
    fail = hold;
    if (hold > (std::numeric_limits<std::uint64_t>::max() >> 2)) {
      throw std::domain_error("threshold never reached");
    }
    hold *= 2;
  }
  while (hold - fail > 1) {
    const std::uint64_t mid = fail + (hold - fail) / 2;
    if (f(static_cast<double>(mid)) <= level) {
      hold = mid;
    } else {
      fail = mid;
    }
  }
  return hold;
}

TauBoundReport tau_upper_bound(double alpha, double delta, std::uint64_t num_alternatives) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in (0, 1]");
  TauBoundReport report;
  report.n0 = first_index_holding_after_peak(concentration_radius, delta / 2.0);
  report.n1 = first_index_holding_after_peak(regret_rate, delta * delta / 32.0);
  report.alpha_term = 32.0 * std::log(1.0 / alpha) / (delta * delta);
  report.constant =
      static_cast<double>(num_alternatives + 2) * std::numbers::pi * std::numbers::pi / 6.0;
  report.total = std::max({static_cast<double>(report.n0), static_cast<double>(report.n1),
                           report.alpha_term}) +
                 report.constant;
  return report;
}

double min_training_size(double alpha, const Eigen::MatrixXd& pairwise_j) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (pairwise_j.rows() != pairwise_j.cols() || pairwise_j.rows() < 2) {
    throw std::invalid_argument("pairwise J matrix must be square with at least two classes");
  }
  double smallest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < pairwise_j.rows(); ++i) {
    for (Eigen::Index j = 0; j < pairwise_j.cols(); ++j) {
      if (i != j) smallest = std::min(smallest, pairwise_j(i, j));
    }
  }
  if (!(smallest > 0.0)) {
    throw std::domain_error("two classes are indistinguishable (zero J divergence)");
  }
  return std::log(1.0 / alpha) / smallest;
}

double mismatch_tolerance(const GapReport& report, Divergence metric) {
  const double g = report.min_pairwise_gap;
  if (!(g > 0.0)) throw std::domain_error("mismatch tolerance needs a separable gap report");
  return metric == Divergence::kl ? 0.5 * g * g : 0.5 * g;
}

std::vector<Interval> tilde_delta_envelope(const GapReport& report, double eps, Divergence metric) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
  if (eps > mismatch_tolerance(report, metric)) {
    throw std::domain_error("eps exceeds the mismatch tolerance");
  }
  const double s = metric == Divergence::kl ? std::sqrt(2.0 * eps) : 2.0 * eps;
  std::vector<Interval> out;
  for (Eigen::Index t = 0; t < report.null_gaps.size(); ++t) {
    const double d = report.null_gaps[t];
    out.push_back({std::max(d - s, 0.0), d + s});
  }
  return out;
}

double vc_sample_size(double gamma, double d, std::uint64_t num_alternatives, double delta) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(d >= 1.0)) throw std::invalid_argument("d must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const double g2 = gamma * gamma;
  const double classes = static_cast<double>(num_alternatives + 1);
  const double bound = 16.0 * d / g2 * std::log(16.0 * std::numbers::e / g2) +
                       16.0 / g2 * std::log(4.0 * classes * classes / delta);
  return std::max(d, bound);
}

double minimax_log_psi_lower(double n, double alpha, double max_kl, double capacity_b,
                             double train_n, double kl_curvature_m,
                             std::uint64_t num_alternatives, double delta_param) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (n < 0.0 || capacity_b < 0.0 || train_n < 0.0 || kl_curvature_m < 0.0) {
    throw std::invalid_argument("n, B, N and M must be nonnegative");
  }
  const double classes = static_cast<double>(num_alternatives + 1);
  const double capacity_term =
      capacity_b / 4.0 * std::exp(-train_n * kl_curvature_m * classes * delta_param * delta_param);
  return -(n * (max_kl - capacity_term) + std::numbers::ln2) / (1.0 - alpha);
}

double lorden_delay_lower(double alpha, const LabelPmf& post_row, const LabelPmf& pre_row) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const double kl = kl_pmf(post_row, pre_row);
  if (!(kl > 0.0) || !std::isfinite(kl)) {
    throw std::domain_error("post/pre KL must be finite and positive");
  }
  return std::log(1.0 / alpha) / kl;
}

QuadraticFit quadratic_fit(const std::vector<double>& alphas, const std::vector<double>& mean_taus,
                           double delta, std::size_t fine_grid) {
  if (alphas.empty() || alphas.size() != mean_taus.size()) {
    throw std::invalid_argument("quadratic fit needs equal, nonempty alpha and tau sequences");
  }
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  std::vector<double> ratios;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double ad = alphas[i] * delta;
    if (!(ad > 0.0 && ad < 1.0)) throw std::invalid_argument("alpha * delta must lie in (0, 1)");
    ratios.push_back(mean_taus[i] * delta * delta / std::log(1.0 / ad));
  }
  QuadraticFit fit;
  fit.c = mean(ratios);

  std::set<double> unique(alphas.begin(), alphas.end());
  const double lo = *unique.begin();
  const double hi = *unique.rbegin();
  std::set<double> grid = unique;
  if (fine_grid > unique.size() && hi > lo) {
    for (double a : geomspace(lo, hi, fine_grid - unique.size() + 2)) grid.insert(a);
  }
  for (double a : grid) fit.curve.emplace_back(a, fit.c * std::log(1.0 / a) / (delta * delta));
  return fit;
}

}  // namespace evertest
