#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "opc/neural/tensor.hpp"

namespace opc::neural {

struct Conv1dLayer {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_size = 5;
  std::size_t stride = 1;
  std::size_t padding = 2;
  std::vector<double> weights;  // [out][in][kernel]
  std::vector<double> bias;     // [out]

  Conv1dLayer() = default;
  Conv1dLayer(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride_, std::size_t pad)
      : in_channels(in), out_channels(out), kernel_size(kernel), stride(stride_), padding(pad),
        weights(out * in * kernel, 0.0), bias(out, 0.0) {}

  double& w(std::size_t o, std::size_t c, std::size_t k) { return weights[(o * in_channels + c) * kernel_size + k]; }
  double w(std::size_t o, std::size_t c, std::size_t k) const { return weights[(o * in_channels + c) * kernel_size + k]; }

  /// floor((L + 2 padding - kernel) / stride) + 1
  std::size_t output_length(std::size_t length) const;
};

struct DenseLayer {
  std::size_t in_features = 0;
  std::size_t out_features = 0;
  std::vector<double> weights;  // [out][in]
  std::vector<double> bias;     // [out]

  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out) : in_features(in), out_features(out), weights(in * out, 0.0), bias(out, 0.0) {}
};

/// input [C_in, L] -> [C_out, L_out], zero padding.
Tensor conv1d_forward(const Tensor& input, const Conv1dLayer& layer);

/// Accumulates weight/bias gradients into `grads` and, when `grad_input` is
/// non-null, writes dLoss/dInput there (shape of `input`).
void conv1d_backward(const Tensor& input, const Conv1dLayer& layer, const Tensor& grad_output,
                     Conv1dLayer& grads, Tensor* grad_input);

struct PoolResult {
  Tensor output;                    // [C, floor(L/2)]
  std::vector<std::size_t> argmax;  // flat input index per output element
};

/// Kernel 2, stride 2; a trailing odd element is dropped, ties keep the earlier index.
PoolResult maxpool_forward(const Tensor& input);
Tensor maxpool_backward(const PoolResult& pool, const Tensor& grad_output, const std::vector<std::size_t>& input_shape);

std::vector<double> dense_forward(std::span<const double> input, const DenseLayer& layer);
/// Accumulates into `grads`; returns dLoss/dInput.
std::vector<double> dense_backward(std::span<const double> input, const DenseLayer& layer,
                                   std::span<const double> grad_output, DenseLayer& grads);

void relu_inplace(std::span<double> values);

}  // namespace opc::neural
