#include "evertest/classifier_sim.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace evertest {

void GaussianTupleSpec::validate() const {
  if (means.size() < 2) throw std::invalid_argument("gaussian tuple needs at least two classes");
  if (variances.size() == 0) throw std::invalid_argument("gaussian tuple has zero dimension");
  if ((variances.array() <= 0.0).any()) {
    throw std::invalid_argument("variances must be strictly positive");
  }
  for (const auto& m : means) {
    if (m.size() != variances.size()) throw std::invalid_argument("mean dimension mismatch");
  }
}

GaussianTupleSpec gaussian_spec_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  GaussianTupleSpec spec;
  for (const auto& m : doc.at("means")) {
    const auto v = m.get<std::vector<double>>();
    spec.means.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  const auto var = doc.at("variances").get<std::vector<double>>();
  spec.variances = Eigen::Map<const Eigen::VectorXd>(var.data(), static_cast<Eigen::Index>(var.size()));
  spec.validate();
  return spec;
}

std::string to_json(const GaussianTupleSpec& spec) {
  nlohmann::json doc;
  doc["means"] = nlohmann::json::array();
  for (const auto& m : spec.means) {
    doc["means"].push_back(std::vector<double>(m.data(), m.data() + m.size()));
  }
  doc["variances"] =
      std::vector<double>(spec.variances.data(), spec.variances.data() + spec.variances.size());
  return doc.dump();
}

Eigen::VectorXd sample(const GaussianTupleSpec& spec, Label theta, CounterRng& rng) {
  if (theta >= spec.num_labels()) throw std::out_of_range("class index out of range");
  const auto d = spec.dimension();
  Eigen::VectorXd x(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    x[i] = spec.means[theta][i] + std::sqrt(spec.variances[i]) * rng.normal();
  }
  return x;
}

void OfflineDataset::validate() const {
  if (samples.size() < 2) throw std::invalid_argument("dataset needs at least two classes");
  for (const auto& s : samples) {
    if (s.rows() == 0) throw std::invalid_argument("dataset has an empty class");
    if (s.rows() != samples.front().rows()) {
      throw std::invalid_argument("dataset classes must have equal sample counts");
    }
    if (s.cols() != samples.front().cols()) throw std::invalid_argument("dimension mismatch");
  }
}

OfflineDataset draw_dataset(const GaussianTupleSpec& spec, Eigen::Index per_class, CounterRng& rng) {
  spec.validate();
  if (per_class < 1) throw std::invalid_argument("need at least one sample per class");
  OfflineDataset data;
  for (Label theta = 0; theta < spec.num_labels(); ++theta) {
    Eigen::MatrixXd block(per_class, spec.dimension());
    for (Eigen::Index i = 0; i < per_class; ++i) block.row(i) = sample(spec, theta, rng).transpose();
    data.samples.push_back(std::move(block));
  }
  return data;
}

void write_dataset_csv(const std::filesystem::path& path, const OfflineDataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  for (Label theta = 0; theta < data.num_labels(); ++theta) {
    const auto& block = data.samples[theta];
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      out << theta;
      for (Eigen::Index j = 0; j < block.cols(); ++j) out << ',' << block(i, j);
      out << '\n';
    }
  }
}

OfflineDataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<std::vector<double>>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    const auto label = static_cast<std::size_t>(std::stoul(cell));
    std::vector<double> coords;
    while (std::getline(cells, cell, ',')) coords.push_back(std::stod(cell));
    if (label >= rows.size()) rows.resize(label + 1);
    rows[label].push_back(std::move(coords));
  }
  OfflineDataset data;
  for (const auto& cls : rows) {
    if (cls.empty()) throw std::invalid_argument("dataset has an empty class");
    Eigen::MatrixXd block(static_cast<Eigen::Index>(cls.size()),
                          static_cast<Eigen::Index>(cls.front().size()));
    for (std::size_t i = 0; i < cls.size(); ++i) {
      if (cls[i].size() != cls.front().size()) throw std::invalid_argument("ragged dataset row");
      for (std::size_t j = 0; j < cls[i].size(); ++j) {
        block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cls[i][j];
      }
    }
    data.samples.push_back(std::move(block));
  }
  data.validate();
  return data;
}

Label CentroidClassifier::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Label best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double dist = (centroids.row(c).transpose() - x).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<Label>(c);
    }
  }
  return best;
}

CentroidClassifier train_centroid(const OfflineDataset& data) {
  data.validate();
  CentroidClassifier clf;
  clf.centroids.resize(static_cast<Eigen::Index>(data.num_labels()), data.samples.front().cols());
  for (Label theta = 0; theta < data.num_labels(); ++theta) {
    clf.centroids.row(static_cast<Eigen::Index>(theta)) = data.samples[theta].colwise().mean();
  }
  return clf;
}

std::vector<ThresholdClassifier> threshold_family(double lo, double hi, std::size_t count,
                                                  Eigen::Index coordinate) {
  if (count == 0) throw std::invalid_argument("empty threshold family");
  std::vector<ThresholdClassifier> family;
  family.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? lo
                                : lo + (hi - lo) * static_cast<double>(i) /
                                           static_cast<double>(count - 1);
    family.push_back({coordinate, t, 0, 1});
  }
  return family;
}

namespace {

ConfusionMatrix from_counts(const Eigen::MatrixXd& counts) {
  Eigen::MatrixXd rows = counts;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) rows.row(r) /= counts.row(r).sum();
  return ConfusionMatrix(std::move(rows));
}

}  // namespace

ConfusionMatrix estimate_confusion(const Classifier& classifier, const GaussianTupleSpec& spec,
                                   std::size_t n_eval, CounterRng& rng) {
  spec.validate();
  if (n_eval < 1) throw std::invalid_argument("n_eval must be at least 1");
  const auto n = static_cast<Eigen::Index>(spec.num_labels());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
  for (Label theta = 0; theta < spec.num_labels(); ++theta) {
    for (std::size_t i = 0; i < n_eval; ++i) {
      const Label m = classifier(sample(spec, theta, rng));
      if (m >= spec.num_labels()) throw std::out_of_range("classifier label out of range");
      counts(static_cast<Eigen::Index>(theta), static_cast<Eigen::Index>(m)) += 1.0;
    }
  }
  return from_counts(counts);
}

ConfusionMatrix empirical_confusion(const Classifier& classifier, const OfflineDataset& data) {
  data.validate();
  const auto n = static_cast<Eigen::Index>(data.num_labels());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
  for (Label theta = 0; theta < data.num_labels(); ++theta) {
    const auto& block = data.samples[theta];
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      const Label m = classifier(block.row(i).transpose());
      if (m >= data.num_labels()) throw std::out_of_range("classifier label out of range");
      counts(static_cast<Eigen::Index>(theta), static_cast<Eigen::Index>(m)) += 1.0;
    }
  }
  return from_counts(counts);
}

double empirical_gap(const Classifier& classifier, const OfflineDataset& data) {
  return gaps(empirical_confusion(classifier, data)).min_pairwise_gap;
}

Label inverse_cdf_label(const LabelPmf& pmf, double u) {
  double cumulative = 0.0;
  Label last_positive = 0;
  for (Label m = 0; m < pmf.size(); ++m) {
    if (pmf[m] <= 0.0) continue;
    cumulative += pmf[m];
    last_positive = m;
    if (u < cumulative) return m;
  }
  // Rounding can leave the cumulative sum a hair below 1.
  return last_positive;
}

LabelStream multinomial_stream(const LabelPmf& row, CounterRng rng) {
  return LabelStream(row.size(), [row, rng]() mutable -> std::optional<Label> {
    return inverse_cdf_label(row, rng.uniform());
  });
}

CoupledLabelStream coupled_multinomial_stream(const std::vector<LabelPmf>& rows, CounterRng rng) {
  std::vector<std::size_t> sizes;
  for (const auto& r : rows) sizes.push_back(r.size());
  return CoupledLabelStream(std::move(sizes), [rows, rng](std::vector<Label>& out) mutable {
    const double u = rng.uniform();
    for (std::size_t c = 0; c < rows.size(); ++c) out[c] = inverse_cdf_label(rows[c], u);
  });
}

LabelStream classified_gaussian_stream(const GaussianTupleSpec& spec, Label theta,
                                       Classifier classifier, std::size_t num_labels,
                                       CounterRng rng) {
  spec.validate();
  if (theta >= spec.num_labels()) throw std::out_of_range("class index out of range");
  auto shared = std::make_shared<const GaussianTupleSpec>(spec);
  return LabelStream(num_labels, [shared, theta, classifier = std::move(classifier),
                                  rng]() mutable -> std::optional<Label> {
    return classifier(sample(*shared, theta, rng));
  });
}

ErmResult erm_max_gap(const std::vector<Classifier>& family, const OfflineDataset& data) {
  if (family.empty()) throw std::invalid_argument("ERM over an empty family");
  ErmResult best{0, -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double g = empirical_gap(family[i], data);
    if (g > best.gap) best = {i, g};
  }
  return best;
}

}  // namespace evertest
