#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace opc::neural {

struct AdamState {
  std::size_t step = 0;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

/// Zeroed moments shaped like `params`.
AdamState make_adam(std::span<const std::span<double>> params, double lr);

/// Bias-corrected Adam update of every parameter array; increments `step` once.
void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads);

struct PlateauScheduler {
  double factor = 0.5;
  std::size_t patience = 2;
  double threshold = 1e-4;  // absolute improvement required
  double min_lr = 1e-6;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t stall_count = 0;
};

/// Returns the learning rate to use next. Throws NonFiniteLoss.
double scheduler_step(PlateauScheduler& sched, double lr, double epoch_loss);

}  // namespace opc::neural
