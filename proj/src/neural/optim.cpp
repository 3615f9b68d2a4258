#include "opc/neural/optim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opc/error.hpp"

namespace opc::neural {

AdamState make_adam(std::span<const std::span<double>> params, double lr) {
  AdamState s;
  s.lr = lr;
  for (auto p : params) {
    s.first_moment.emplace_back(p.size(), 0.0);
    s.second_moment.emplace_back(p.size(), 0.0);
  }
  return s;
}

void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw Error(Errc::ShapeMismatch, "adam: parameter/gradient/moment array counts differ");
  }
  for (std::size_t a = 0; a < params.size(); ++a) {
    if (params[a].size() != grads[a].size() || params[a].size() != state.first_moment[a].size()) {
      throw Error(Errc::ShapeMismatch, "adam: array " + std::to_string(a) + " size mismatch");
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correct1 = 1.0 - std::pow(state.beta1, t);
  const double correct2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t a = 0; a < params.size(); ++a) {
    auto& m = state.first_moment[a];
    auto& v = state.second_moment[a];
    auto p = params[a];
    auto g = grads[a];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correct1;
      const double v_hat = v[i] / correct2;
      p[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

double scheduler_step(PlateauScheduler& sched, double lr, double epoch_loss) {
  if (!std::isfinite(epoch_loss)) throw Error(Errc::NonFiniteLoss, "epoch loss is not finite");
  if (epoch_loss < sched.best_loss - sched.threshold) {
    sched.best_loss = epoch_loss;
    sched.stall_count = 0;
    return lr;
  }
  ++sched.stall_count;
  if (sched.stall_count > sched.patience) {
    sched.stall_count = 0;
    return std::min(lr, std::max(lr * sched.factor, sched.min_lr));
  }
  return lr;
}

}  // namespace opc::neural
