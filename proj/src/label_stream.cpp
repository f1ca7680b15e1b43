#include "evertest/label_stream.hpp"

#include <memory>
#include <stdexcept>
#include <string>

namespace evertest {

LabelStream::LabelStream(std::size_t num_labels, Generator next)
    : num_labels_(num_labels), next_(std::move(next)) {
  if (num_labels_ < 2) throw std::invalid_argument("a label stream needs at least two labels");
  if (!next_) throw std::invalid_argument("empty label generator");
}

LabelStream LabelStream::from_labels(std::size_t num_labels, std::vector<Label> labels) {
  auto data = std::make_shared<std::vector<Label>>(std::move(labels));
  return LabelStream(num_labels, [data, pos = std::size_t{0}]() mutable -> std::optional<Label> {
    if (pos >= data->size()) return std::nullopt;
    return (*data)[pos++];
  });
}

LabelStream LabelStream::constant(std::size_t num_labels, Label label) {
  return LabelStream(num_labels, [label]() -> std::optional<Label> { return label; });
}

LabelStream LabelStream::switching(LabelStream before, LabelStream after, std::size_t change_at) {
  if (before.num_labels() != after.num_labels()) {
    throw std::invalid_argument("switching streams must share the label set");
  }
  const auto n = before.num_labels();
  auto pre = std::make_shared<LabelStream>(std::move(before));
  auto post = std::make_shared<LabelStream>(std::move(after));
  return LabelStream(n, [pre, post, change_at, t = std::size_t{0}]() mutable {
    ++t;
    return t < change_at ? pre->next() : post->next();
  });
}

std::optional<Label> LabelStream::next() {
  auto label = next_();
  if (label) {
    if (*label >= num_labels_) {
      throw std::out_of_range("label " + std::to_string(*label) + " out of range for " +
                              std::to_string(num_labels_) + " labels");
    }
    ++consumed_;
  }
  return label;
}

CoupledLabelStream::CoupledLabelStream(std::vector<std::size_t> num_labels, Generator next)
    : num_labels_(std::move(num_labels)), next_(std::move(next)), current_(num_labels_.size()) {
  if (num_labels_.empty()) throw std::invalid_argument("coupled stream needs a channel");
}

const std::vector<Label>& CoupledLabelStream::next() {
  next_(current_);
  for (std::size_t c = 0; c < current_.size(); ++c) {
    if (current_[c] >= num_labels_[c]) {
      throw std::out_of_range("coupled channel " + std::to_string(c) + " label out of range");
    }
  }
  return current_;
}

}  // namespace evertest
