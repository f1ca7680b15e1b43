#include "evertest/published_tables.hpp"

namespace evertest::published {

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

ConfusionMatrix gaussian_three_class() {
  return ConfusionMatrix::from_rows({{0.483609, 0.243609, 0.272782},
                                     {0.186343, 0.559332, 0.254325},
                                     {0.200000, 0.244970, 0.555030}});
}

ConfusionMatrix cifar_three_class() {
  return ConfusionMatrix::from_rows({{0.867, 0.065, 0.068},
                                     {0.062, 0.903, 0.035},
                                     {0.14, 0.048, 0.812}});
}

ConfusionMatrix mismatch_train() {
  return ConfusionMatrix::from_rows({{0.948529, 0.051471}, {0.012195, 0.987805}});
}

ConfusionMatrix mismatch_test() {
  return ConfusionMatrix::from_rows({{0.701987, 0.298013}, {0.087248, 0.912752}});
}

ConfusionMatrix change_detection() {
  return ConfusionMatrix::from_rows({{0.933413, 0.066587}, {0.063393, 0.936607}});
}

ConfusionMatrix mixture_strong() {
  return ConfusionMatrix::from_rows({{0.635678, 0.132508, 0.231814},
                                     {0.167847, 0.594985, 0.237168},
                                     {0.149833, 0.123749, 0.726418}});
}

ConfusionMatrix mixture_weak() {
  return ConfusionMatrix::from_rows({{0.482644, 0.230909, 0.286447},
                                     {0.198230, 0.515929, 0.285841},
                                     {0.200485, 0.233546, 0.565969}});
}

GaussianTupleSpec gaussian_ten_dim() {
  GaussianTupleSpec spec;
  spec.means = {vec({0, 0, 0, 0, 0, 0.9, 0.8, 0.9, 0.8, 0.9}),
                vec({0, 0, 0.1, 0.1, 0.1, 0.7, 0.8, 0.9, 0.9, 0.9}),
                vec({0, 0, 0, 0, 0, 1, 1, 1, 1, 1})};
  spec.variances = Eigen::VectorXd::Ones(10);
  return spec;
}

GaussianTupleSpec gaussian_two_dim() {
  GaussianTupleSpec spec;
  spec.means = {vec({-1.5, -1.0}), vec({1.5, 1.0})};
  spec.variances = Eigen::VectorXd::Ones(2);
  return spec;
}

GaussianTupleSpec gaussian_two_dim_shifted() {
  GaussianTupleSpec spec = gaussian_two_dim();
  spec.means[0] += vec({1.0, 0.5});
  spec.means[1] += vec({-0.5, -0.5});
  return spec;
}

}  // namespace evertest::published
