#include "opc/shallow/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "opc/error.hpp"
#include "opc/random.hpp"

namespace opc::shallow {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

struct BinaryResult {
  std::vector<double> w;
  double b = 0.0;
  std::vector<double> objective_by_epoch;
};

BinaryResult train_binary(const FeatureMatrix& data, int positive, const SvmConfig& cfg,
                          std::uint64_t stream) {
  const std::size_t n = data.rows;
  const std::size_t d = data.cols;
  const double lambda = 1.0 / (cfg.C * static_cast<double>(n));
  const double radius_sq = 1.0 / lambda;

  // slot d is the bias (constant-1 feature)
  std::vector<double> w(d + 1, 0.0);
  std::vector<double> avg(d + 1, 0.0);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(cfg.seed, stream));

  BinaryResult result;
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    for (std::size_t i : order) {
      ++t;
      auto x = data.row(i);
      const double y = data.labels[i] == positive ? 1.0 : -1.0;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double margin = y * (dot(std::span<const double>(w).first(d), x) + w[d]);

      const double shrink = 1.0 - eta * lambda;
      for (double& e : w) e *= shrink;
      if (margin < 1.0) {
        for (std::size_t j = 0; j < d; ++j) w[j] += eta * y * x[j];
        w[d] += eta * y;
      }
      // project onto the ball of radius 1/sqrt(lambda)
      const double sq = dot(w, w);
      if (sq > radius_sq) {
        const double f = std::sqrt(radius_sq / sq);
        for (double& e : w) e *= f;
      }
      const double inv_t = 1.0 / static_cast<double>(t);
      for (std::size_t j = 0; j <= d; ++j) avg[j] += (w[j] - avg[j]) * inv_t;
    }
    result.objective_by_epoch.push_back(
        hinge_objective(std::span<const double>(avg).first(d), avg[d], data, positive, cfg.C));
  }
  result.w.assign(avg.begin(), avg.begin() + static_cast<std::ptrdiff_t>(d));
  result.b = avg[d];
  return result;
}

}  // namespace

double hinge_objective(std::span<const double> w, double b, const FeatureMatrix& data,
                       int positive, double C) {
  double reg = 0.5 * dot(w, w);
  double loss = 0.0;
  for (std::size_t i = 0; i < data.rows; ++i) {
    const double y = data.labels[i] == positive ? 1.0 : -1.0;
    loss += std::max(0.0, 1.0 - y * (dot(w, data.row(i)) + b));
  }
  return reg + C * loss;
}

LinearSvmModel train_svm(const FeatureMatrix& train, const SvmConfig& config) {
  if (config.epochs < 1) throw Error(Errc::InvalidArgument, "svm epochs must be >= 1");
  if (!(config.C > 0.0)) throw Error(Errc::InvalidArgument, "svm C must be positive");
  std::size_t present = 0;
  for (std::size_t c : train.class_counts()) present += c > 0 ? 1 : 0;
  if (present < 2) throw Error(Errc::SingleClass, "svm training needs at least 2 classes");

  LinearSvmModel model;
  model.config = config;
  model.objective_history.assign(config.epochs, 0.0);
  for (std::size_t c = 0; c < train.n_classes; ++c) {
    const int positive = static_cast<int>(c);
    auto r = train_binary(train, positive, config, c);
    model.initial_objective += config.C * static_cast<double>(train.rows);
    for (std::size_t e = 0; e < config.epochs; ++e) model.objective_history[e] += r.objective_by_epoch[e];
    model.weights.push_back(std::move(r.w));
    model.bias.push_back(r.b);
  }
  return model;
}

std::vector<double> svm_decision_values(const LinearSvmModel& model, std::span<const double> row) {
  if (row.size() != model.num_features()) {
    throw Error(Errc::DimensionMismatch, "svm expects " + std::to_string(model.num_features()) +
                                             " features, got " + std::to_string(row.size()));
  }
  std::vector<double> scores(model.num_classes());
  for (std::size_t c = 0; c < scores.size(); ++c) scores[c] = dot(model.weights[c], row) + model.bias[c];
  return scores;
}

int predict_svm(const LinearSvmModel& model, std::span<const double> row) {
  auto scores = svm_decision_values(model, row);
  // max_element returns the first maximum, i.e. the lowest class id on ties
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

}  // namespace opc::shallow
