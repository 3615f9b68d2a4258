#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "opc/matrix.hpp"

namespace opc::shallow {

struct SvmConfig {
  double C = 1.0;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
};

/// One-vs-rest linear SVM. weights[c] has one entry per feature.
struct LinearSvmModel {
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  SvmConfig config;
  // Sum over the one-vs-rest problems of (1/2)|w|^2 + C * sum hinge, evaluated
  // at the averaged iterate. initial_objective is the value at w = 0, b = 0.
  double initial_objective = 0.0;
  std::vector<double> objective_history;

  std::size_t num_classes() const { return weights.size(); }
  std::size_t num_features() const { return weights.empty() ? 0 : weights.front().size(); }
};

/// Pegasos stochastic subgradient descent per class with lambda = 1 / (C N) and
/// step 1 / (lambda t). The bias rides along as a constant-1 feature and the
/// returned weights are the running average of all iterates.
LinearSvmModel train_svm(const FeatureMatrix& train, const SvmConfig& config);

/// (1/2)|w|^2 + C * sum_i max(0, 1 - y_i (w . x_i + b)) with y = +1 for `positive`.
double hinge_objective(std::span<const double> w, double b, const FeatureMatrix& data,
                       int positive, double C);

std::vector<double> svm_decision_values(const LinearSvmModel& model, std::span<const double> row);

/// argmax over decision values, ties to the lowest class id.
int predict_svm(const LinearSvmModel& model, std::span<const double> row);

}  // namespace opc::shallow
