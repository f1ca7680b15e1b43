#pragma once

#include <cstdint>
#include <vector>

#include "evertest/eprocess.hpp"
#include "evertest/label_stream.hpp"

namespace evertest {

struct TestConfig {
  double alpha = 0.05;
  /// Horizon cap; a run that has not crossed 1/alpha by then reports stopped = false.
  std::uint64_t max_steps = 100000;
  Evaluator evaluator = Evaluator::exact();
  bool record_trajectory = false;

  void validate() const;
};

struct TestResult {
  bool stopped = false;
  /// Stopping time; meaningful only when `stopped`.
  std::uint64_t tau = 0;
  /// Index backed on the stopping step (or on the last step when not stopped).
  Label j_hat_at_stop = 0;
  double final_log_wealth = 0.0;
  std::uint64_t steps_consumed = 0;
  std::vector<TrajectoryRow> trajectory;
};

/// Runs the level-alpha power-one test: stops at the first n with W_n >= 1/alpha.
/// Never pulls a label past the stopping step. An exhausted finite stream ends the
/// run unstopped.
TestResult run_test(LabelStream& labels, const TestConfig& config);

/// j_hat_t for t = 1..horizon (shorter if the stream runs dry).
std::vector<Label> identification_trace(LabelStream& labels, std::uint64_t horizon);

struct MixtureTestResult {
  bool stopped = false;
  std::uint64_t tau = 0;
  double final_log_wealth = 0.0;
  /// Per-channel backed index at the stopping step.
  std::vector<Label> j_hat_at_stop;
};

/// The same stopping rule applied to a fixed-weight mixture of per-channel e-processes
/// sharing one raw stream.
MixtureTestResult run_mixture_test(CoupledLabelStream& labels, const std::vector<double>& weights,
                                   const TestConfig& config);

}  // namespace evertest
