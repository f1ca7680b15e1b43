#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "evertest/core_stats.hpp"

namespace evertest {

/// Sufficient statistics of the betting product. With Y_t = 1{label=0} - 1{label=j_hat_t}
/// and u = -lambda, prod_t (1 + lambda Y_t) = (1 - u)^null_hits (1 + u)^target_hits.
struct BetCounts {
  /// Steps with label 0 while backing a non-null index.
  std::uint64_t null_hits = 0;
  /// Steps whose label matched the backed non-null index.
  std::uint64_t target_hits = 0;

  friend bool operator==(const BetCounts&, const BetCounts&) = default;
};

/// Wealth as a linear value and its natural log. `value` saturates to +inf
/// above 1e300; `log_value` stays finite.
struct Wealth {
  double value = 1.0;
  double log_value = 0.0;
};

/// Uniform midpoint grid lambda_i = -(i - 1/2)/K on (-1, 0] with cached log factors.
class LambdaGrid {
 public:
  explicit LambdaGrid(std::size_t size);

  std::size_t size() const { return lambdas_.size(); }
  double lambda(std::size_t i) const { return lambdas_[i]; }
  /// ln(1 + lambda_i * y) for y = +1 and y = -1.
  double log_factor_null(std::size_t i) const { return log_null_[i]; }
  double log_factor_target(std::size_t i) const { return log_target_[i]; }

 private:
  std::vector<double> lambdas_;
  std::vector<double> log_null_;
  std::vector<double> log_target_;
};

struct EngineState {
  std::uint64_t steps = 0;
  std::vector<std::uint64_t> label_counts;
  BetCounts bet;
  /// Per-lambda log-products; empty when no grid is maintained.
  std::vector<double> grid_log_products;
  std::shared_ptr<const LambdaGrid> grid;

  std::size_t num_labels() const { return label_counts.size(); }
  bool has_grid() const { return grid != nullptr; }
};

/// How wealth is evaluated: the exact lambda-mixture or a K-point grid average.
struct Evaluator {
  enum class Kind { exact, grid };
  Kind kind = Kind::exact;
  std::size_t grid_size = 0;

  static Evaluator exact() { return {}; }
  static Evaluator grid(std::size_t k) { return {Kind::grid, k}; }
};

EngineState make_engine(std::size_t num_labels, std::size_t grid_size = 0);

/// Argmax of counts with the smallest index winning ties. All-zero counts
/// (the uniform initial estimate) select 0.
Label select_j(std::span<const std::uint64_t> label_counts);

/// Betting outcome Y for one label: +1 (null label while backing j != 0),
/// -1 (label equals the backed j != 0), 0 otherwise.
int bet_outcome(Label label, Label j_hat);

/// Advances `state` in place by one label and returns the index j_hat that
/// was backed on this step, computed from the counts before the label is tallied.
Label advance(EngineState& state, Label label);

/// Value-returning form of `advance`.
EngineState step(EngineState state, Label label);

/// Exact wealth: integral over u in [0,1] of (1-u)^a (1+u)^b, evaluated as
/// sum_{k=0}^{b} C(b,k) k! a! / (a+k+1)! by summing outward from the largest term.
Wealth wealth_exact(const BetCounts& bet);

/// Grid wealth (1/K) sum_i M_{n,i}; throws if the state keeps no grid.
Wealth wealth_grid(const EngineState& state);

Wealth evaluate(const EngineState& state, const Evaluator& evaluator);

/// Weighted sum of wealths. Weights must be nonnegative and sum to one.
Wealth mixture_wealth(std::span<const Wealth> wealths, std::span<const double> weights);

/// Mixture over engines advanced on the same raw stream; their step counts must agree.
Wealth mixture_wealth(std::span<const EngineState> states, std::span<const double> weights,
                      const Evaluator& evaluator = Evaluator::exact());

void validate_weights(std::span<const double> weights);

/// Returns true iff wealth >= 1/alpha (linear comparison while finite).
bool crosses_threshold(const Wealth& wealth, double alpha);

struct TrajectoryRow {
  std::uint64_t step = 0;
  Label label = 0;
  Label j_hat = 0;
  BetCounts bet;
  double log_wealth = 0.0;
};

/// CSV with header step,label,j_hat,a,b,log_wealth.
void write_trajectory_csv(std::ostream& os, std::span<const TrajectoryRow> rows);

/// log(sum_i exp(x_i)); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> xs);

}  // namespace evertest
