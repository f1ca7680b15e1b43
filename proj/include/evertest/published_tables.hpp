#pragma once

#include "evertest/classifier_sim.hpp"
#include "evertest/core_stats.hpp"

/// Reference confusion matrices and Gaussian tuples from the reported experiments.
namespace evertest::published {

/// Three-class 10-d Gaussian tuple with an MLP classifier (stopping-time case 1).
ConfusionMatrix gaussian_three_class();
/// Three CIFAR-10 classes with a VGG16 classifier (stopping-time case 2).
ConfusionMatrix cifar_three_class();
/// Two-class classifier evaluated on its training distributions.
ConfusionMatrix mismatch_train();
/// The same classifier evaluated on mean-shifted test distributions.
ConfusionMatrix mismatch_test();
/// Two-class classifier used for change detection.
ConfusionMatrix change_detection();
/// Stronger (g2) and weaker (g1) classifiers on the three-class Gaussian tuple.
ConfusionMatrix mixture_strong();
ConfusionMatrix mixture_weak();

GaussianTupleSpec gaussian_ten_dim();
/// mu0 = [-1.5, -1], mu1 = [1.5, 1], identity covariance.
GaussianTupleSpec gaussian_two_dim();
/// gaussian_two_dim shifted by [1, 0.5] (class 0) and [-0.5, -0.5] (class 1).
GaussianTupleSpec gaussian_two_dim_shifted();

}  // namespace evertest::published
