#include "opc/neural/trainer.hpp"

#include <algorithm>
#include <numeric>

#include "opc/error.hpp"
#include "opc/random.hpp"

namespace opc::neural {

CnnTrainResult train_cnn(const FeatureMatrix& inputs, const CnnTrainConfig& config) {
  std::size_t present = 0;
  for (std::size_t c : inputs.class_counts()) present += c > 0 ? 1 : 0;
  if (inputs.n_classes < 2 || present < 2) throw Error(Errc::SingleClass, "cnn training needs at least 2 classes");
  if (inputs.rows == 0 || config.batch_size == 0) throw Error(Errc::InvalidArgument, "cnn training needs at least one batch");
  if (config.epochs == 0) throw Error(Errc::InvalidArgument, "cnn epochs must be >= 1");

  CnnArchitecture arch;
  arch.input_dim = inputs.cols;
  arch.num_classes = inputs.n_classes;
  arch.conv1_channels = config.conv1_channels;
  arch.conv2_channels = config.conv2_channels;
  arch.hidden = config.hidden;
  arch.dropout = config.dropout;

  CnnTrainResult result;
  result.model = make_cnn(arch, mix_seed(config.seed, 0));
  CnnModel& model = result.model;
  auto params = model.parameters();
  AdamState adam = make_adam(params, config.lr);
  PlateauScheduler sched = config.scheduler;

  std::vector<std::size_t> order(inputs.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(mix_seed(config.seed, 1));
  std::uint64_t batch_counter = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), shuffle_rng);
    result.lr_history.push_back(adam.lr);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t n = std::min(config.batch_size, order.size() - start);
      Tensor batch({n, inputs.cols});
      std::vector<int> labels(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto src = inputs.row(order[start + i]);
        std::copy(src.begin(), src.end(), batch.row(i).begin());
        labels[i] = inputs.labels[order[start + i]];
      }
      auto g = backward(model, batch, labels, true, mix_seed(config.seed, 2 + batch_counter++));
      loss_sum += g.loss * static_cast<double>(n);
      const auto& grads = g.grads;
      adam_step(adam, params, grads.parameters());
    }
    const double epoch_loss = loss_sum / static_cast<double>(inputs.rows);
    result.loss_history.push_back(epoch_loss);
    adam.lr = scheduler_step(sched, adam.lr, epoch_loss);
    if (config.on_epoch_end) config.on_epoch_end(epoch, model);
  }
  return result;
}

CnnTrainResult train_cnn(const SequenceEncoding& encodings, const CnnTrainConfig& config) {
  return train_cnn(encodings.matrix, config);
}

CnnPrediction predict_cnn(const CnnModel& model, std::span<const double> row) {
  Tensor batch({1, row.size()}, std::vector<double>(row.begin(), row.end()));
  Tensor logits = forward(model, batch, false, 0);
  auto r = logits.row(0);
  const auto best = std::max_element(r.begin(), r.end());
  return {static_cast<int>(best - r.begin()), *best};
}

std::vector<int> predict_cnn_all(const CnnModel& model, const FeatureMatrix& inputs) {
  std::vector<int> out;
  out.reserve(inputs.rows);
  for (std::size_t i = 0; i < inputs.rows; ++i) out.push_back(predict_cnn(model, inputs.row(i)).label);
  return out;
}

}  // namespace opc::neural
