#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace opc {

/// Dense row-major samples x features matrix with one class label per row.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<int> labels;
  std::size_t n_classes = 0;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c, std::size_t k)
      : rows(r), cols(c), values(r * c, 0.0), labels(r, 0), n_classes(k) {}

  std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(n_classes, 0);
    for (int y : labels) ++counts[static_cast<std::size_t>(y)];
    return counts;
  }

  FeatureMatrix select(std::span<const std::size_t> indices) const {
    FeatureMatrix out(indices.size(), cols, n_classes);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      auto src = row(indices[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
      out.labels[i] = labels[indices[i]];
    }
    return out;
  }

  bool operator==(const FeatureMatrix&) const = default;
};

}  // namespace opc
