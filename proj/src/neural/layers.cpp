#include "opc/neural/layers.hpp"

#include <algorithm>

#include "opc/error.hpp"

namespace opc::neural {

namespace {

// Output positions t whose input tap t*stride + k - padding lands in [0, L).
struct TapRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

TapRange valid_taps(std::size_t k, std::size_t padding, std::size_t stride, std::size_t length,
                    std::size_t out_length) {
  // need t*stride + k >= padding and t*stride + k < padding + length
  std::size_t begin = 0;
  if (k < padding) begin = (padding - k + stride - 1) / stride;
  std::size_t end = 0;
  if (padding + length > k) end = std::min(out_length, (padding + length - k + stride - 1) / stride);
  return {begin, std::max(begin, end)};
}

}  // namespace

std::size_t Conv1dLayer::output_length(std::size_t length) const {
  if (length + 2 * padding < kernel_size) return 0;
  return (length + 2 * padding - kernel_size) / stride + 1;
}

Tensor conv1d_forward(const Tensor& input, const Conv1dLayer& layer) {
  if (input.shape.size() != 2 || input.dim(0) != layer.in_channels) {
    throw Error(Errc::ShapeMismatch, "conv1d expects [" + std::to_string(layer.in_channels) + ", L] input");
  }
  const std::size_t length = input.dim(1);
  const std::size_t out_len = layer.output_length(length);
  if (out_len == 0) throw Error(Errc::ShapeMismatch, "conv1d input shorter than the kernel");

  Tensor out({layer.out_channels, out_len});
  for (std::size_t o = 0; o < layer.out_channels; ++o) {
    double* dst = out.data.data() + o * out_len;
    std::fill(dst, dst + out_len, layer.bias[o]);
    for (std::size_t c = 0; c < layer.in_channels; ++c) {
      const double* src = input.data.data() + c * length;
      for (std::size_t k = 0; k < layer.kernel_size; ++k) {
        const double wk = layer.w(o, c, k);
        const auto r = valid_taps(k, layer.padding, layer.stride, length, out_len);
        if (layer.stride == 1) {
          const double* s = src + (r.begin + k - layer.padding);
          for (std::size_t t = r.begin; t < r.end; ++t) dst[t] += wk * s[t - r.begin];
        } else {
          for (std::size_t t = r.begin; t < r.end; ++t) dst[t] += wk * src[t * layer.stride + k - layer.padding];
        }
      }
    }
  }
  return out;
}

void conv1d_backward(const Tensor& input, const Conv1dLayer& layer, const Tensor& grad_output,
                     Conv1dLayer& grads, Tensor* grad_input) {
  const std::size_t length = input.dim(1);
  const std::size_t out_len = grad_output.dim(1);
  if (grad_output.dim(0) != layer.out_channels || out_len != layer.output_length(length)) {
    throw Error(Errc::ShapeMismatch, "conv1d gradient shape does not match the layer output");
  }
  if (grad_input) *grad_input = Tensor(input.shape);

  for (std::size_t o = 0; o < layer.out_channels; ++o) {
    const double* g = grad_output.data.data() + o * out_len;
    double bsum = 0.0;
    for (std::size_t t = 0; t < out_len; ++t) bsum += g[t];
    grads.bias[o] += bsum;
    for (std::size_t c = 0; c < layer.in_channels; ++c) {
      const double* src = input.data.data() + c * length;
      double* gin = grad_input ? grad_input->data.data() + c * length : nullptr;
      for (std::size_t k = 0; k < layer.kernel_size; ++k) {
        const auto r = valid_taps(k, layer.padding, layer.stride, length, out_len);
        const double wk = layer.w(o, c, k);
        double acc = 0.0;
        for (std::size_t t = r.begin; t < r.end; ++t) {
          const std::size_t idx = t * layer.stride + k - layer.padding;
          acc += g[t] * src[idx];
          if (gin) gin[idx] += wk * g[t];
        }
        grads.w(o, c, k) += acc;
      }
    }
  }
}

PoolResult maxpool_forward(const Tensor& input) {
  if (input.shape.size() != 2) throw Error(Errc::ShapeMismatch, "maxpool expects [C, L] input");
  const std::size_t channels = input.dim(0);
  const std::size_t length = input.dim(1);
  if (length < 2) throw Error(Errc::LengthTooShort, "maxpool needs L >= 2, got " + std::to_string(length));
  const std::size_t out_len = length / 2;

  PoolResult r{Tensor({channels, out_len}), std::vector<std::size_t>(channels * out_len)};
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t t = 0; t < out_len; ++t) {
      const std::size_t a = c * length + 2 * t;
      const std::size_t pick = input.data[a + 1] > input.data[a] ? a + 1 : a;
      r.output.data[c * out_len + t] = input.data[pick];
      r.argmax[c * out_len + t] = pick;
    }
  }
  return r;
}

Tensor maxpool_backward(const PoolResult& pool, const Tensor& grad_output, const std::vector<std::size_t>& input_shape) {
  if (grad_output.size() != pool.argmax.size()) throw Error(Errc::ShapeMismatch, "maxpool gradient size");
  Tensor grad(input_shape);
  for (std::size_t i = 0; i < pool.argmax.size(); ++i) grad.data[pool.argmax[i]] += grad_output.data[i];
  return grad;
}

std::vector<double> dense_forward(std::span<const double> input, const DenseLayer& layer) {
  if (input.size() != layer.in_features) {
    throw Error(Errc::ShapeMismatch, "dense layer expects " + std::to_string(layer.in_features) +
                                         " inputs, got " + std::to_string(input.size()));
  }
  std::vector<double> out(layer.bias);
  for (std::size_t o = 0; o < layer.out_features; ++o) {
    const double* w = layer.weights.data() + o * layer.in_features;
    double s = 0.0;
    for (std::size_t i = 0; i < layer.in_features; ++i) s += w[i] * input[i];
    out[o] += s;
  }
  return out;
}

std::vector<double> dense_backward(std::span<const double> input, const DenseLayer& layer,
                                   std::span<const double> grad_output, DenseLayer& grads) {
  std::vector<double> grad_in(layer.in_features, 0.0);
  for (std::size_t o = 0; o < layer.out_features; ++o) {
    const double g = grad_output[o];
    grads.bias[o] += g;
    if (g == 0.0) continue;
    const double* w = layer.weights.data() + o * layer.in_features;
    double* gw = grads.weights.data() + o * layer.in_features;
    for (std::size_t i = 0; i < layer.in_features; ++i) {
      gw[i] += g * input[i];
      grad_in[i] += g * w[i];
    }
  }
  return grad_in;
}

void relu_inplace(std::span<double> values) {
  for (double& v : values) v = v > 0.0 ? v : 0.0;
}

}  // namespace opc::neural
