#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace evertest {

/// Index of a classifier output label; label 0 is the null class.
using Label = std::size_t;

/// Tolerance on the sum of a probability vector.
inline constexpr double kPmfSumTolerance = 1e-9;

/// A probability mass function over the labels 0..L (L >= 1).
///
/// Construction validates; inputs are never renormalized silently. Use
/// `LabelPmf::normalized` when raw frequencies need rescaling.
class LabelPmf {
 public:
  explicit LabelPmf(Eigen::VectorXd probs);
  explicit LabelPmf(const std::vector<double>& probs);

  static LabelPmf normalized(const Eigen::VectorXd& weights);
  static LabelPmf uniform(std::size_t num_labels);

  std::size_t size() const { return static_cast<std::size_t>(probs_.size()); }
  double operator[](Label m) const { return probs_[static_cast<Eigen::Index>(m)]; }
  const Eigen::VectorXd& probs() const { return probs_; }

 private:
  Eigen::VectorXd probs_;
};

/// Row theta is the label distribution of g(X) when X ~ P_theta.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(Eigen::MatrixXd rows);

  static ConfusionMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static ConfusionMatrix identity(std::size_t num_labels);

  std::size_t num_labels() const { return static_cast<std::size_t>(rows_.rows()); }
  LabelPmf row(Label theta) const;
  double operator()(Label theta, Label m) const {
    return rows_(static_cast<Eigen::Index>(theta), static_cast<Eigen::Index>(m));
  }
  const Eigen::MatrixXd& matrix() const { return rows_; }

  /// Applies the same label permutation to rows and columns:
  /// result(perm[i], perm[j]) = (*this)(i, j).
  ConfusionMatrix permuted(const std::vector<Label>& perm) const;

 private:
  Eigen::MatrixXd rows_;
};

struct GapReport {
  // pairwise(theta, m) = p_theta[theta] - p_theta[m]
  Eigen::MatrixXd pairwise;
  // null_gaps[theta] = p_theta[theta] - p_theta[0]
  Eigen::VectorXd null_gaps;
  double min_pairwise_gap = 0.0;
};

enum class Divergence { kl, tv };

GapReport gaps(const ConfusionMatrix& cm);

/// Strict diagonal dominance of every row; ties are not separable.
bool is_separable(const ConfusionMatrix& cm);

/// KL divergence in nats. Returns +inf when q has a zero where p does not.
double kl_pmf(const LabelPmf& p, const LabelPmf& q);

/// Total variation: half the L1 distance.
double tv_pmf(const LabelPmf& p, const LabelPmf& q);

double divergence(const LabelPmf& p, const LabelPmf& q, Divergence metric);

/// KL between two Gaussians sharing a diagonal covariance.
double kl_gaussian_diag(const Eigen::VectorXd& mu_p, const Eigen::VectorXd& mu_q,
                        const Eigen::VectorXd& var);

double j_symmetrized(const LabelPmf& p, const LabelPmf& q);
double j_symmetrized_gaussian_diag(const Eigen::VectorXd& mu_p, const Eigen::VectorXd& mu_q,
                                   const Eigen::VectorXd& var);

/// Largest row-wise divergence D(train_row || test_row) (KL) or TV(train_row, test_row).
double max_row_divergence(const ConfusionMatrix& train, const ConfusionMatrix& test,
                          Divergence metric);

/// True iff every row pair is within eps under the chosen divergence.
bool mismatch_within(const ConfusionMatrix& train, const ConfusionMatrix& test, double eps,
                     Divergence metric);

Divergence parse_divergence(const std::string& name);
std::string to_string(Divergence metric);

// Serialization. JSON: {"rows": [[...], ...]}; CSV: one row per line.
std::string to_json(const ConfusionMatrix& cm);
ConfusionMatrix confusion_from_json(const std::string& text);
ConfusionMatrix confusion_from_csv(const std::string& text);
/// Dispatches on the extension (.csv) or, failing that, on the first non-blank character.
ConfusionMatrix read_confusion(const std::filesystem::path& path);
void write_confusion(const std::filesystem::path& path, const ConfusionMatrix& cm);

std::ostream& operator<<(std::ostream& os, const ConfusionMatrix& cm);

}  // namespace evertest
