#pragma once
// Finite-difference comparison of every CNN parameter gradient. The
// numerical side only evaluates the loss; it never sees backward().

#include <algorithm>
#include <cmath>
#include <span>

#include "opc/neural/cnn.hpp"

namespace gradcheck {

struct Result {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
};

// |a - n| / max(|a|, |n|, eps)
inline double relative_error(double analytic, double numeric, double eps) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), eps});
}

inline Result run(const opc::neural::CnnModel& model, const opc::neural::Tensor& batch, std::span<const int> labels,
                  bool training, std::uint64_t seed, double h, double eps) {
  using namespace opc::neural;
  const auto analytic = backward(model, batch, labels, training, seed);
  const auto grads = analytic.grads.parameters();
  CnnModel probe = model;
  auto params = probe.parameters();
  auto loss = [&] { return cross_entropy(forward(probe, batch, training, seed), labels).loss; };
  Result r;
  for (std::size_t a = 0; a < params.size(); ++a) {
    for (std::size_t i = 0; i < params[a].size(); ++i) {
      const double saved = params[a][i];
      params[a][i] = saved + h;
      const double up = loss();
      params[a][i] = saved - h;
      const double down = loss();
      params[a][i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      r.max_relative_error = std::max(r.max_relative_error, relative_error(grads[a][i], numeric, eps));
      ++r.checked;
    }
  }
  return r;
}

}  // namespace gradcheck
