#include "evertest/eprocess.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>

namespace evertest {

namespace {

constexpr double kLogSaturation = 690.7755278982137;  // ln(1e300)
constexpr double kSeriesCutoff = 1e-20;
constexpr std::uint64_t kLinearPeakLimit = 64;

Wealth from_log(double log_value) {
  Wealth w;
  w.log_value = log_value;
  w.value = log_value > kLogSaturation ? std::numeric_limits<double>::infinity()
                                       : std::exp(log_value);
  return w;
}

std::shared_ptr<const LambdaGrid> shared_grid(std::size_t size) {
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const LambdaGrid>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[size];
  if (!slot) slot = std::make_shared<const LambdaGrid>(size);
  return slot;
}

}  // namespace

LambdaGrid::LambdaGrid(std::size_t size) {
  if (size == 0) throw std::invalid_argument("lambda grid needs at least one point");
  lambdas_.resize(size);
  log_null_.resize(size);
  log_target_.resize(size);
  const double k = static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double lambda = -(static_cast<double>(i) + 0.5) / k;
    lambdas_[i] = lambda;
    log_null_[i] = std::log1p(lambda);
    log_target_[i] = std::log1p(-lambda);
  }
}

EngineState make_engine(std::size_t num_labels, std::size_t grid_size) {
  if (num_labels < 2) throw std::invalid_argument("engine needs at least two labels");
  EngineState state;
  state.label_counts.assign(num_labels, 0);
  if (grid_size > 0) {
    state.grid = shared_grid(grid_size);
    state.grid_log_products.assign(grid_size, 0.0);
  }
  return state;
}

Label select_j(std::span<const std::uint64_t> label_counts) {
  Label best = 0;
  for (Label m = 1; m < label_counts.size(); ++m) {
    if (label_counts[m] > label_counts[best]) best = m;
  }
  return best;
}

int bet_outcome(Label label, Label j_hat) {
  if (j_hat == 0) return 0;
  if (label == 0) return 1;
  if (label == j_hat) return -1;
  return 0;
}

Label advance(EngineState& state, Label label) {
  if (label >= state.label_counts.size()) {
    throw std::out_of_range("label " + std::to_string(label) + " out of range");
  }
  const Label j_hat = select_j(state.label_counts);
  const int y = bet_outcome(label, j_hat);
  if (y == 1) {
    ++state.bet.null_hits;
  } else if (y == -1) {
    ++state.bet.target_hits;
  }
  if (y != 0 && state.grid) {
    const LambdaGrid& grid = *state.grid;
    auto& logs = state.grid_log_products;
    if (y == 1) {
      for (std::size_t i = 0; i < logs.size(); ++i) logs[i] += grid.log_factor_null(i);
    } else {
      for (std::size_t i = 0; i < logs.size(); ++i) logs[i] += grid.log_factor_target(i);
    }
  }
  ++state.label_counts[label];
  ++state.steps;
  return j_hat;
}

EngineState step(EngineState state, Label label) {
  advance(state, label);
  return state;
}

Wealth wealth_exact(const BetCounts& bet) {
  // Terms T_k = C(b,k) k! a! / (a+k+1)!, T_0 = 1/(a+1), T_{k+1}/T_k = (b-k)/(a+k+2).
  // The ratio decreases in k, so the sequence is unimodal with its peak at the
  // first k where the ratio drops to <= 1.
  const double a = static_cast<double>(bet.null_hits);
  const double b = static_cast<double>(bet.target_hits);
  const std::uint64_t b_int = bet.target_hits;

  std::uint64_t peak = 0;
  if (b > a + 2.0) {
    peak = static_cast<std::uint64_t>(std::ceil((b - a - 2.0) / 2.0));
    peak = std::min(peak, b_int);
  }

  double log_peak = 0.0;
  double linear_peak = 0.0;
  const bool linear = peak <= kLinearPeakLimit;
  if (linear) {
    linear_peak = 1.0 / (a + 1.0);
    for (std::uint64_t k = 0; k < peak; ++k) {
      const double kd = static_cast<double>(k);
      linear_peak *= (b - kd) / (a + kd + 2.0);
    }
    log_peak = std::log(linear_peak);
  } else {
    const double kp = static_cast<double>(peak);
    log_peak = std::lgamma(b + 1.0) - std::lgamma(b - kp + 1.0) + std::lgamma(a + 1.0) -
               std::lgamma(a + kp + 2.0);
  }

  // Relative sum around the peak; terms fall off monotonically on both sides.
  double upper = 0.0;
  double term = 1.0;
  for (std::uint64_t k = peak; k < b_int; ++k) {
    const double kd = static_cast<double>(k);
    term *= (b - kd) / (a + kd + 2.0);
    upper += term;
    if (term < kSeriesCutoff) break;
  }
  double lower = 0.0;
  term = 1.0;
  for (std::uint64_t k = peak; k > 0; --k) {
    const double kd = static_cast<double>(k);
    term *= (a + kd + 1.0) / (b - kd + 1.0);
    lower += term;
    if (term < kSeriesCutoff) break;
  }
  const double relative = (lower + 1.0) + upper;

  if (linear) {
    const double value = linear_peak * relative;
    if (std::isfinite(value) && value <= 1e300) {
      return Wealth{value, std::log(value)};
    }
  }
  return from_log(log_peak + std::log(relative));
}

double log_sum_exp(std::span<const double> xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

Wealth wealth_grid(const EngineState& state) {
  if (!state.grid || state.grid_log_products.empty()) {
    throw std::logic_error("wealth_grid: engine keeps no lambda grid");
  }
  const double k = static_cast<double>(state.grid_log_products.size());
  return from_log(log_sum_exp(state.grid_log_products) - std::log(k));
}

Wealth evaluate(const EngineState& state, const Evaluator& evaluator) {
  if (evaluator.kind == Evaluator::Kind::exact) return wealth_exact(state.bet);
  if (state.grid_log_products.size() != evaluator.grid_size) {
    throw std::logic_error("engine grid size does not match the evaluator");
  }
  return wealth_grid(state);
}

void validate_weights(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("mixture needs at least one weight");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("mixture weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > kPmfSumTolerance) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
}

Wealth mixture_wealth(std::span<const Wealth> wealths, std::span<const double> weights) {
  validate_weights(weights);
  if (wealths.size() != weights.size()) {
    throw std::invalid_argument("one weight per wealth process required");
  }
  std::vector<double> logs;
  logs.reserve(wealths.size());
  for (std::size_t i = 0; i < wealths.size(); ++i) {
    if (weights[i] > 0.0) logs.push_back(std::log(weights[i]) + wealths[i].log_value);
  }
  return from_log(log_sum_exp(logs));
}

Wealth mixture_wealth(std::span<const EngineState> states, std::span<const double> weights,
                      const Evaluator& evaluator) {
  if (states.empty()) throw std::invalid_argument("mixture needs at least one state");
  std::vector<Wealth> wealths;
  wealths.reserve(states.size());
  for (const auto& s : states) {
    if (s.steps != states.front().steps) {
      throw std::invalid_argument("mixture states have differing step counts");
    }
    wealths.push_back(evaluate(s, evaluator));
  }
  return mixture_wealth(std::span<const Wealth>(wealths), weights);
}

bool crosses_threshold(const Wealth& wealth, double alpha) {
  if (std::isfinite(wealth.value)) return wealth.value >= 1.0 / alpha;
  return wealth.log_value >= -std::log(alpha);
}

void write_trajectory_csv(std::ostream& os, std::span<const TrajectoryRow> rows) {
  os << "step,label,j_hat,a,b,log_wealth\n";
  const auto old_precision = os.precision(17);
  for (const auto& r : rows) {
    os << r.step << ',' << r.label << ',' << r.j_hat << ',' << r.bet.null_hits << ','
       << r.bet.target_hits << ',' << r.log_wealth << '\n';
  }
  os.precision(old_precision);
}

}  // namespace evertest
