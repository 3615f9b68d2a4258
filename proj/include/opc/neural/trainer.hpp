#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "opc/features.hpp"
#include "opc/matrix.hpp"
#include "opc/neural/cnn.hpp"
#include "opc/neural/optim.hpp"

namespace opc::neural {

struct CnnTrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double lr = 0.001;
  std::uint64_t seed = 0;
  std::size_t conv1_channels = 64;
  std::size_t conv2_channels = 128;
  std::size_t hidden = 128;
  double dropout = 0.3;
  PlateauScheduler scheduler;
  /// Called after each epoch with the epoch index and the current model.
  std::function<void(std::size_t, const CnnModel&)> on_epoch_end;
};

struct CnnTrainResult {
  CnnModel model;
  std::vector<double> loss_history;  // mean training loss per epoch
  std::vector<double> lr_history;    // learning rate used in each epoch
};

/// Mini-batch Adam on mean cross-entropy; the scheduler watches the epoch
/// training loss. Rows of `inputs` are the network inputs.
CnnTrainResult train_cnn(const FeatureMatrix& inputs, const CnnTrainConfig& config);
CnnTrainResult train_cnn(const SequenceEncoding& encodings, const CnnTrainConfig& config);

struct CnnPrediction {
  int label = 0;
  double score = 0.0;  // winning logit
};

CnnPrediction predict_cnn(const CnnModel& model, std::span<const double> row);
std::vector<int> predict_cnn_all(const CnnModel& model, const FeatureMatrix& inputs);

}  // namespace opc::neural
