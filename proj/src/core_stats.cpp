#include "evertest/core_stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace evertest {

namespace {

void validate_pmf(const Eigen::VectorXd& probs) {
  if (probs.size() < 2) {
    throw std::invalid_argument("label pmf needs at least two labels");
  }
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double v = probs[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("label pmf entry " + std::to_string(i) +
                                  " outside [0, 1]: " + std::to_string(v));
    }
  }
  const double total = probs.sum();
  if (std::abs(total - 1.0) > kPmfSumTolerance) {
    throw std::invalid_argument("label pmf sums to " + std::to_string(total));
  }
}

void require_same_length(const LabelPmf& p, const LabelPmf& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("pmf length mismatch: " + std::to_string(p.size()) + " vs " +
                                std::to_string(q.size()));
  }
}

void require_same_shape(const ConfusionMatrix& a, const ConfusionMatrix& b) {
  if (a.num_labels() != b.num_labels()) {
    throw std::invalid_argument("confusion matrix shape mismatch");
  }
}

}  // namespace

LabelPmf::LabelPmf(Eigen::VectorXd probs) : probs_(std::move(probs)) { validate_pmf(probs_); }

LabelPmf::LabelPmf(const std::vector<double>& probs)
    : LabelPmf(Eigen::Map<const Eigen::VectorXd>(probs.data(),
                                                 static_cast<Eigen::Index>(probs.size()))) {}

LabelPmf LabelPmf::normalized(const Eigen::VectorXd& weights) {
  if ((weights.array() < 0.0).any()) {
    throw std::invalid_argument("cannot normalize negative weights");
  }
  const double total = weights.sum();
  if (!(total > 0.0)) {
    throw std::invalid_argument("cannot normalize an all-zero weight vector");
  }
  return LabelPmf(Eigen::VectorXd(weights / total));
}

LabelPmf LabelPmf::uniform(std::size_t num_labels) {
  const auto n = static_cast<Eigen::Index>(num_labels);
  return LabelPmf(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(num_labels)));
}

ConfusionMatrix::ConfusionMatrix(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  if (rows_.rows() != rows_.cols()) {
    throw std::invalid_argument("confusion matrix must be square");
  }
  for (Eigen::Index r = 0; r < rows_.rows(); ++r) {
    try {
      validate_pmf(rows_.row(r).transpose());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("row " + std::to_string(r) + ": " + e.what());
    }
  }
}

ConfusionMatrix ConfusionMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw std::invalid_argument("confusion matrix must be square");
    }
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return ConfusionMatrix(std::move(m));
}

ConfusionMatrix ConfusionMatrix::identity(std::size_t num_labels) {
  const auto n = static_cast<Eigen::Index>(num_labels);
  return ConfusionMatrix(Eigen::MatrixXd::Identity(n, n));
}

LabelPmf ConfusionMatrix::row(Label theta) const {
  if (theta >= num_labels()) throw std::out_of_range("confusion row out of range");
  return LabelPmf(Eigen::VectorXd(rows_.row(static_cast<Eigen::Index>(theta)).transpose()));
}

ConfusionMatrix ConfusionMatrix::permuted(const std::vector<Label>& perm) const {
  const auto n = rows_.rows();
  if (static_cast<Eigen::Index>(perm.size()) != n) {
    throw std::invalid_argument("permutation length mismatch");
  }
  std::vector<bool> seen(perm.size(), false);
  for (Label p : perm) {
    if (p >= perm.size() || seen[p]) throw std::invalid_argument("not a permutation");
    seen[p] = true;
  }
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]),
          static_cast<Eigen::Index>(perm[static_cast<std::size_t>(j)])) = rows_(i, j);
    }
  }
  return ConfusionMatrix(std::move(out));
}

GapReport gaps(const ConfusionMatrix& cm) {
  const Eigen::MatrixXd& p = cm.matrix();
  const auto n = p.rows();
  GapReport report;
  report.pairwise = p.diagonal().replicate(1, n) - p;
  report.pairwise.diagonal().setZero();
  report.null_gaps = report.pairwise.col(0);
  report.min_pairwise_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < n; ++t) {
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m != t) report.min_pairwise_gap = std::min(report.min_pairwise_gap, report.pairwise(t, m));
    }
  }
  return report;
}

bool is_separable(const ConfusionMatrix& cm) { return gaps(cm).min_pairwise_gap > 0.0; }

double kl_pmf(const LabelPmf& p, const LabelPmf& q) {
  require_same_length(p, q);
  double total = 0.0;
  for (Label i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    total += p[i] * std::log(p[i] / q[i]);
  }
  // Rounding can leave a tiny negative value for p ~= q.
  return std::max(total, 0.0);
}

double tv_pmf(const LabelPmf& p, const LabelPmf& q) {
  require_same_length(p, q);
  return 0.5 * (p.probs() - q.probs()).lpNorm<1>();
}

double divergence(const LabelPmf& p, const LabelPmf& q, Divergence metric) {
  return metric == Divergence::kl ? kl_pmf(p, q) : tv_pmf(p, q);
}

double kl_gaussian_diag(const Eigen::VectorXd& mu_p, const Eigen::VectorXd& mu_q,
                        const Eigen::VectorXd& var) {
  if (mu_p.size() != mu_q.size() || mu_p.size() != var.size()) {
    throw std::invalid_argument("gaussian dimension mismatch");
  }
  if ((var.array() <= 0.0).any()) {
    throw std::invalid_argument("variances must be strictly positive");
  }
  return 0.5 * ((mu_p - mu_q).array().square() / var.array()).sum();
}

double j_symmetrized(const LabelPmf& p, const LabelPmf& q) { return kl_pmf(p, q) + kl_pmf(q, p); }

double j_symmetrized_gaussian_diag(const Eigen::VectorXd& mu_p, const Eigen::VectorXd& mu_q,
                                   const Eigen::VectorXd& var) {
  return kl_gaussian_diag(mu_p, mu_q, var) + kl_gaussian_diag(mu_q, mu_p, var);
}

double max_row_divergence(const ConfusionMatrix& train, const ConfusionMatrix& test,
                          Divergence metric) {
  require_same_shape(train, test);
  double worst = 0.0;
  for (Label t = 0; t < train.num_labels(); ++t) {
    worst = std::max(worst, divergence(train.row(t), test.row(t), metric));
  }
  return worst;
}

bool mismatch_within(const ConfusionMatrix& train, const ConfusionMatrix& test, double eps,
                     Divergence metric) {
  if (!(eps >= 0.0)) throw std::invalid_argument("mismatch eps must be nonnegative");
  return max_row_divergence(train, test, metric) <= eps;
}

Divergence parse_divergence(const std::string& name) {
  if (name == "kl" || name == "KL") return Divergence::kl;
  if (name == "tv" || name == "TV") return Divergence::tv;
  throw std::invalid_argument("unknown divergence '" + name + "' (expected kl or tv)");
}

std::string to_string(Divergence metric) { return metric == Divergence::kl ? "kl" : "tv"; }

std::string to_json(const ConfusionMatrix& cm) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < cm.matrix().rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < cm.matrix().cols(); ++c) row.push_back(cm.matrix()(r, c));
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"rows", rows}}.dump();
}

ConfusionMatrix confusion_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  const auto& rows = doc.is_object() ? doc.at("rows") : doc;
  return ConfusionMatrix::from_rows(rows.get<std::vector<std::vector<double>>>());
}

ConfusionMatrix confusion_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return ConfusionMatrix::from_rows(rows);
}

ConfusionMatrix read_confusion(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open confusion matrix file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (path.extension() == ".csv") return confusion_from_csv(text);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    return confusion_from_json(text);
  }
  return confusion_from_csv(text);
}

void write_confusion(const std::filesystem::path& path, const ConfusionMatrix& cm) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (path.extension() == ".csv") {
    out << std::setprecision(17);
    for (Eigen::Index r = 0; r < cm.matrix().rows(); ++r) {
      for (Eigen::Index c = 0; c < cm.matrix().cols(); ++c) {
        if (c) out << ',';
        out << cm.matrix()(r, c);
      }
      out << '\n';
    }
  } else {
    out << to_json(cm) << '\n';
  }
}

std::ostream& operator<<(std::ostream& os, const ConfusionMatrix& cm) {
  return os << cm.matrix();
}

}  // namespace evertest
