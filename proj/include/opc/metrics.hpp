#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace opc {

/// counts[true][predicted]
struct ConfusionMatrix {
  std::size_t k = 0;
  std::vector<std::size_t> counts;

  std::size_t at(std::size_t truth, std::size_t predicted) const { return counts[truth * k + predicted]; }
  std::size_t total() const;
};

ConfusionMatrix confusion(std::span<const int> true_labels, std::span<const int> predicted_labels,
                          std::size_t k);

struct MetricsReport {
  double accuracy = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<std::size_t> support;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  ConfusionMatrix matrix;
};

/// Zero denominators yield 0. Weighted aggregates use true-class support.
MetricsReport compute_report(const ConfusionMatrix& cm);

/// Fixed-width table with 2-decimal percentages followed by the confusion
/// matrix. Class names wider than 20 characters are cut with "...".
std::string render_report(const MetricsReport& report, std::span<const std::string> class_names);

nlohmann::json report_to_json(const MetricsReport& report, std::span<const std::string> class_names);

}  // namespace opc
