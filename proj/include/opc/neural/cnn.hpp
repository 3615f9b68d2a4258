#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "opc/neural/layers.hpp"
#include "opc/neural/tensor.hpp"

namespace opc::neural {

/// conv1(1->c1) -> ReLU -> pool -> conv2(c1->c2) -> ReLU -> pool -> flatten
/// -> fc1(->hidden) -> ReLU -> dropout -> fc2(->classes)
struct CnnArchitecture {
  std::size_t input_dim = 512;
  std::size_t num_classes = 2;
  std::size_t conv1_channels = 64;
  std::size_t conv2_channels = 128;
  std::size_t hidden = 128;
  std::size_t kernel_size = 5;
  std::size_t stride = 1;
  std::size_t padding = 2;
  double dropout = 0.3;

  bool operator==(const CnnArchitecture&) const = default;
};

struct CnnModel {
  CnnArchitecture arch;
  Conv1dLayer conv1;
  Conv1dLayer conv2;
  DenseLayer fc1;
  DenseLayer fc2;
  std::size_t fc1_input_dim = 0;

  /// Parameter arrays in declaration order:
  /// conv1.w, conv1.b, conv2.w, conv2.b, fc1.w, fc1.b, fc2.w, fc2.b.
  std::vector<std::span<double>> parameters();
  std::vector<std::span<const double>> parameters() const;
  std::size_t parameter_count() const;

  /// Same shapes, all zeros.
  CnnModel zeros_like() const;
};

/// Width of the flattened convolutional output, measured by pushing a probe
/// of length input_dim through a conv stack of the given architecture.
std::size_t infer_fc1_input_dim(const CnnArchitecture& arch);

/// Builds the network with weights drawn uniformly from +-1/sqrt(fan_in);
/// fc1's input width comes from infer_fc1_input_dim.
CnnModel make_cnn(const CnnArchitecture& arch, std::uint64_t seed);

/// Flattened output of the convolutional stack for one sample [1, L].
Tensor forward_features(const CnnModel& model, const Tensor& sample);

/// Inverted-dropout keep mask scaled by 1/(1-p) for sample `index` of a
/// batch; depends only on (seed, index, width, p).
std::vector<double> dropout_mask(std::uint64_t seed, std::size_t index, std::size_t width, double p);

/// batch [B, input_dim] -> logits [B, num_classes]. Dropout is applied only
/// when `training` is set.
Tensor forward(const CnnModel& model, const Tensor& batch, bool training, std::uint64_t seed);

Tensor softmax(const Tensor& logits);

struct CrossEntropyResult {
  double loss = 0.0;
  Tensor grad;  // dLoss/dLogits = (softmax - onehot) / B
};

CrossEntropyResult cross_entropy(const Tensor& logits, std::span<const int> labels);

struct Gradients {
  double loss = 0.0;
  Tensor logits;
  CnnModel grads;  // parameter arrays hold dLoss/dParam
};

/// Forward pass with the same (training, seed) masks, then hand-derived
/// backpropagation of the mean cross-entropy.
Gradients backward(const CnnModel& model, const Tensor& batch, std::span<const int> labels,
                   bool training, std::uint64_t seed);

}  // namespace opc::neural
