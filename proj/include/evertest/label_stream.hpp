#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "evertest/core_stats.hpp"

namespace evertest {

/// A (possibly infinite) source of classifier outputs g(X_1), g(X_2), ...
/// over the label set 0..num_labels-1. `next()` returns nullopt when a finite
/// source is exhausted.
class LabelStream {
 public:
  using Generator = std::function<std::optional<Label>()>;

  LabelStream(std::size_t num_labels, Generator next);

  static LabelStream from_labels(std::size_t num_labels, std::vector<Label> labels);
  static LabelStream constant(std::size_t num_labels, Label label);
  /// Labels from `before` for steps 1..change_at-1, from `after` afterwards.
  static LabelStream switching(LabelStream before, LabelStream after, std::size_t change_at);

  std::size_t num_labels() const { return num_labels_; }

  /// Next label; throws std::out_of_range if the source yields a label >= num_labels.
  std::optional<Label> next();

  std::size_t consumed() const { return consumed_; }

 private:
  std::size_t num_labels_;
  Generator next_;
  std::size_t consumed_ = 0;
};

/// Several label channels driven by one underlying draw per step (e.g. two
/// classifiers looking at the same X_t).
class CoupledLabelStream {
 public:
  using Generator = std::function<void(std::vector<Label>&)>;

  CoupledLabelStream(std::vector<std::size_t> num_labels, Generator next);

  std::size_t channels() const { return num_labels_.size(); }
  std::size_t num_labels(std::size_t channel) const { return num_labels_.at(channel); }

  const std::vector<Label>& next();

 private:
  std::vector<std::size_t> num_labels_;
  Generator next_;
  std::vector<Label> current_;
};

}  // namespace evertest
