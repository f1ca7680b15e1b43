#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "evertest/eprocess.hpp"
#include "evertest/label_stream.hpp"

namespace evertest {

/// One restarted e-process W^{(k)}: counts and bets over the window [k, n] only.
struct StartState {
  std::uint64_t start = 0;
  std::vector<std::uint64_t> label_counts;
  BetCounts bet;
  Wealth wealth;
};

struct DetectorState {
  std::uint64_t steps = 0;
  std::vector<StartState> starts;
  Wealth current_max;
  std::size_t num_labels = 0;
  /// When set, keeps at most this many starts by wealth, plus the newest one.
  std::optional<std::size_t> prune_cap;
};

DetectorState make_detector(std::size_t num_labels,
                            std::optional<std::size_t> prune_cap = std::nullopt);

/// Spawns the start k = n+1, feeds `label` to every active start (each selecting
/// its own j_hat from its window counts), and returns M_n = max_k W_n^{(k)}.
Wealth detector_step(DetectorState& state, Label label);

struct DetectionRecord {
  bool alarmed = false;
  std::uint64_t alarm_time = 0;
  double final_log_max = 0.0;
  std::uint64_t steps_consumed = 0;
};

/// First n with M_n >= 1/alpha, or no alarm within max_steps.
DetectionRecord run_detector(LabelStream& labels, double alpha, std::uint64_t max_steps,
                             std::optional<std::size_t> prune_cap = std::nullopt);

}  // namespace evertest
