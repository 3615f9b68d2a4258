#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace opc::neural {

/// Row-major dense tensor of doubles.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s, double fill = 0.0)
      : shape(std::move(s)), data(element_count(shape), fill) {}
  Tensor(std::vector<std::size_t> s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {}

  static std::size_t element_count(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
  }

  std::size_t dim(std::size_t i) const { return shape.at(i); }
  std::size_t size() const { return data.size(); }

  // 2-D access
  double& operator()(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }

  std::span<double> row(std::size_t i) { return {data.data() + i * shape[1], shape[1]}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * shape[1], shape[1]}; }

  bool operator==(const Tensor&) const = default;
};

}  // namespace opc::neural
