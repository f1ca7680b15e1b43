#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "evertest/core_stats.hpp"
#include "evertest/label_stream.hpp"
#include "evertest/rng.hpp"

namespace evertest {

/// Gaussian P_theta = N(means[theta], diag(variances)) for theta = 0..L.
struct GaussianTupleSpec {
  std::vector<Eigen::VectorXd> means;
  Eigen::VectorXd variances;

  std::size_t num_labels() const { return means.size(); }
  Eigen::Index dimension() const { return variances.size(); }
  void validate() const;
};

GaussianTupleSpec gaussian_spec_from_json(const std::string& text);
std::string to_json(const GaussianTupleSpec& spec);

Eigen::VectorXd sample(const GaussianTupleSpec& spec, Label theta, CounterRng& rng);

/// Per-class samples stored row-wise: samples[theta] is N x d.
struct OfflineDataset {
  std::vector<Eigen::MatrixXd> samples;

  std::size_t num_labels() const { return samples.size(); }
  Eigen::Index per_class() const { return samples.empty() ? 0 : samples.front().rows(); }
  void validate() const;
};

OfflineDataset draw_dataset(const GaussianTupleSpec& spec, Eigen::Index per_class, CounterRng& rng);

/// CSV rows: label,coord_0,...,coord_{d-1}.
void write_dataset_csv(const std::filesystem::path& path, const OfflineDataset& data);
OfflineDataset read_dataset_csv(const std::filesystem::path& path);

/// Any map from a feature vector to a label.
using Classifier = std::function<Label(const Eigen::Ref<const Eigen::VectorXd>&)>;

struct CentroidClassifier {
  Eigen::MatrixXd centroids;  // (L+1) x d

  /// Nearest centroid in Euclidean distance; ties go to the smaller label.
  Label operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  std::size_t num_labels() const { return static_cast<std::size_t>(centroids.rows()); }
};

CentroidClassifier train_centroid(const OfflineDataset& data);

/// Labels x as `above` when x[coordinate] > threshold, else `below`.
struct ThresholdClassifier {
  Eigen::Index coordinate = 0;
  double threshold = 0.0;
  Label below = 0;
  Label above = 1;

  Label operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return x[coordinate] > threshold ? above : below;
  }
};

/// `count` evenly spaced thresholds on [lo, hi] along one coordinate.
std::vector<ThresholdClassifier> threshold_family(double lo, double hi, std::size_t count,
                                                  Eigen::Index coordinate = 0);

/// Row theta: label frequencies of the classifier on n_eval fresh draws from P_theta.
ConfusionMatrix estimate_confusion(const Classifier& classifier, const GaussianTupleSpec& spec,
                                   std::size_t n_eval, CounterRng& rng);

/// Row theta: label frequencies of the classifier on the class-theta samples.
ConfusionMatrix empirical_confusion(const Classifier& classifier, const OfflineDataset& data);

/// Minimum over theta and m != theta of p_hat[theta][theta] - p_hat[theta][m].
double empirical_gap(const Classifier& classifier, const OfflineDataset& data);

/// Inverse-CDF label for a uniform draw u in [0, 1); cumulative sums run in label order.
Label inverse_cdf_label(const LabelPmf& pmf, double u);

/// I.i.d. labels with the given pmf.
LabelStream multinomial_stream(const LabelPmf& row, CounterRng rng);

/// One uniform per step drives every channel's inverse CDF, so channels looking
/// at the same underlying draw are positively coupled.
CoupledLabelStream coupled_multinomial_stream(const std::vector<LabelPmf>& rows, CounterRng rng);

/// Raw Gaussian draws from P_theta mapped through the classifier.
LabelStream classified_gaussian_stream(const GaussianTupleSpec& spec, Label theta,
                                       Classifier classifier, std::size_t num_labels,
                                       CounterRng rng);

struct ErmResult {
  std::size_t index = 0;
  double gap = 0.0;
};

/// Family member maximizing the empirical gap; ties keep the earliest member.
ErmResult erm_max_gap(const std::vector<Classifier>& family, const OfflineDataset& data);

template <typename C>
std::vector<Classifier> as_classifiers(const std::vector<C>& family) {
  return std::vector<Classifier>(family.begin(), family.end());
}

}  // namespace evertest
