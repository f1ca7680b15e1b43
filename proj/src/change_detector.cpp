#include "evertest/change_detector.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace evertest {

DetectorState make_detector(std::size_t num_labels, std::optional<std::size_t> prune_cap) {
  if (num_labels < 2) throw std::invalid_argument("detector needs at least two labels");
  if (prune_cap && *prune_cap == 0) throw std::invalid_argument("prune cap must be positive");
  DetectorState state;
  state.num_labels = num_labels;
  state.prune_cap = prune_cap;
  return state;
}

namespace {

void prune(DetectorState& state) {
  const std::size_t cap = *state.prune_cap;
  if (state.starts.size() <= cap + 1) return;
  // The newest start sits at the back; rank the rest by wealth, oldest first on ties.
  auto newest = std::move(state.starts.back());
  state.starts.pop_back();
  std::stable_sort(state.starts.begin(), state.starts.end(),
                   [](const StartState& l, const StartState& r) {
                     return l.wealth.log_value > r.wealth.log_value;
                   });
  state.starts.resize(cap);
  std::sort(state.starts.begin(), state.starts.end(),
            [](const StartState& l, const StartState& r) { return l.start < r.start; });
  state.starts.push_back(std::move(newest));
}

}  // namespace

Wealth detector_step(DetectorState& state, Label label) {
  if (label >= state.num_labels) {
    throw std::out_of_range("label " + std::to_string(label) + " out of range");
  }
  StartState fresh;
  fresh.start = state.steps + 1;
  fresh.label_counts.assign(state.num_labels, 0);
  state.starts.push_back(std::move(fresh));

  Wealth best{0.0, -std::numeric_limits<double>::infinity()};
  for (auto& s : state.starts) {
    const Label j_hat = select_j(s.label_counts);
    const int y = bet_outcome(label, j_hat);
    if (y == 1) {
      ++s.bet.null_hits;
      s.wealth = wealth_exact(s.bet);
    } else if (y == -1) {
      ++s.bet.target_hits;
      s.wealth = wealth_exact(s.bet);
    }
    ++s.label_counts[label];
    if (s.wealth.log_value > best.log_value) best = s.wealth;
  }
  ++state.steps;
  state.current_max = best;
  if (state.prune_cap) prune(state);
  return best;
}

DetectionRecord run_detector(LabelStream& labels, double alpha, std::uint64_t max_steps,
                             std::optional<std::size_t> prune_cap) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  DetectorState state = make_detector(labels.num_labels(), prune_cap);
  DetectionRecord record;
  while (state.steps < max_steps) {
    const auto label = labels.next();
    if (!label) break;
    const Wealth m = detector_step(state, *label);
    record.final_log_max = m.log_value;
    if (crosses_threshold(m, alpha)) {
      record.alarmed = true;
      record.alarm_time = state.steps;
      break;
    }
  }
  record.steps_consumed = state.steps;
  return record;
}

}  // namespace evertest
