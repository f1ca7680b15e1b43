#include "evertest/sequential_test.hpp"

#include <stdexcept>

namespace evertest {

void TestConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  if (evaluator.kind == Evaluator::Kind::grid && evaluator.grid_size == 0) {
    throw std::invalid_argument("grid evaluator needs K >= 1");
  }
}

namespace {

std::size_t grid_points(const Evaluator& evaluator) {
  return evaluator.kind == Evaluator::Kind::grid ? evaluator.grid_size : 0;
}

}  // namespace

TestResult run_test(LabelStream& labels, const TestConfig& config) {
  config.validate();
  EngineState state = make_engine(labels.num_labels(), grid_points(config.evaluator));
  TestResult result;
  Wealth wealth;
  BetCounts last_bet;

  while (state.steps < config.max_steps) {
    const auto label = labels.next();
    if (!label) break;
    const Label j_hat = advance(state, *label);
    // Exact wealth depends only on the counts; skip re-evaluation on neutral steps.
    if (config.evaluator.kind == Evaluator::Kind::grid || !(state.bet == last_bet)) {
      wealth = evaluate(state, config.evaluator);
      last_bet = state.bet;
    }
    result.j_hat_at_stop = j_hat;
    if (config.record_trajectory) {
      result.trajectory.push_back({state.steps, *label, j_hat, state.bet, wealth.log_value});
    }
    if (crosses_threshold(wealth, config.alpha)) {
      result.stopped = true;
      result.tau = state.steps;
      break;
    }
  }
  result.final_log_wealth = wealth.log_value;
  result.steps_consumed = state.steps;
  return result;
}

std::vector<Label> identification_trace(LabelStream& labels, std::uint64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  EngineState state = make_engine(labels.num_labels());
  std::vector<Label> trace;
  trace.reserve(horizon);
  while (trace.size() < horizon) {
    const auto label = labels.next();
    if (!label) break;
    trace.push_back(advance(state, *label));
  }
  return trace;
}

MixtureTestResult run_mixture_test(CoupledLabelStream& labels, const std::vector<double>& weights,
                                   const TestConfig& config) {
  config.validate();
  validate_weights(weights);
  if (weights.size() != labels.channels()) {
    throw std::invalid_argument("one mixture weight per channel required");
  }
  const std::size_t k = grid_points(config.evaluator);
  std::vector<EngineState> states;
  for (std::size_t c = 0; c < labels.channels(); ++c) {
    states.push_back(make_engine(labels.num_labels(c), k));
  }
  MixtureTestResult result;
  result.j_hat_at_stop.assign(states.size(), 0);
  Wealth wealth;
  std::uint64_t n = 0;
  while (n < config.max_steps) {
    const auto& step_labels = labels.next();
    for (std::size_t c = 0; c < states.size(); ++c) {
      result.j_hat_at_stop[c] = advance(states[c], step_labels[c]);
    }
    ++n;
    wealth = mixture_wealth(std::span<const EngineState>(states), weights, config.evaluator);
    if (crosses_threshold(wealth, config.alpha)) {
      result.stopped = true;
      result.tau = n;
      break;
    }
  }
  result.final_log_wealth = wealth.log_value;
  return result;
}

}  // namespace evertest
