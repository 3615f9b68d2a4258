#include "opc/neural/cnn.hpp"

#include <algorithm>
#include <cmath>

#include "opc/error.hpp"
#include "opc/random.hpp"

namespace opc::neural {

namespace {

void init_uniform(std::span<double> values, double bound, Rng& rng) {
  for (double& v : values) v = uniform_real(rng, -bound, bound);
}

// Per-sample activations kept for the backward pass.
struct Trace {
  Tensor input;      // [1, L]
  Tensor conv1_pre;  // [c1, L1]
  Tensor relu1;
  PoolResult pool1;
  Tensor conv2_pre;  // [c2, L2]
  Tensor relu2;
  PoolResult pool2;
  std::vector<double> fc1_pre;
  std::vector<double> hidden;  // after ReLU and dropout
  std::vector<double> mask;    // empty when not training
  std::vector<double> logits;
};

Tensor relu(const Tensor& t) {
  Tensor out = t;
  relu_inplace(out.data);
  return out;
}

Trace run_sample(const CnnModel& model, std::span<const double> row, bool training,
                 std::uint64_t seed, std::size_t index) {
  Trace tr;
  tr.input = Tensor({1, row.size()}, std::vector<double>(row.begin(), row.end()));
  tr.conv1_pre = conv1d_forward(tr.input, model.conv1);
  tr.relu1 = relu(tr.conv1_pre);
  tr.pool1 = maxpool_forward(tr.relu1);
  tr.conv2_pre = conv1d_forward(tr.pool1.output, model.conv2);
  tr.relu2 = relu(tr.conv2_pre);
  tr.pool2 = maxpool_forward(tr.relu2);

  tr.fc1_pre = dense_forward(tr.pool2.output.data, model.fc1);
  tr.hidden = tr.fc1_pre;
  relu_inplace(tr.hidden);
  if (training && model.arch.dropout > 0.0) {
    tr.mask = dropout_mask(seed, index, tr.hidden.size(), model.arch.dropout);
    for (std::size_t j = 0; j < tr.hidden.size(); ++j) tr.hidden[j] *= tr.mask[j];
  }
  tr.logits = dense_forward(tr.hidden, model.fc2);
  return tr;
}

void check_batch(const CnnModel& model, const Tensor& batch) {
  if (batch.shape.size() != 2 || batch.dim(1) != model.arch.input_dim) {
    throw Error(Errc::ShapeMismatch, "cnn expects [B, " + std::to_string(model.arch.input_dim) + "] input");
  }
}

}  // namespace

std::vector<std::span<double>> CnnModel::parameters() {
  return {conv1.weights, conv1.bias, conv2.weights, conv2.bias, fc1.weights, fc1.bias, fc2.weights, fc2.bias};
}

std::vector<std::span<const double>> CnnModel::parameters() const {
  return {conv1.weights, conv1.bias, conv2.weights, conv2.bias, fc1.weights, fc1.bias, fc2.weights, fc2.bias};
}

std::size_t CnnModel::parameter_count() const {
  std::size_t n = 0;
  for (auto p : parameters()) n += p.size();
  return n;
}

CnnModel CnnModel::zeros_like() const {
  CnnModel z = *this;
  for (auto p : z.parameters()) std::fill(p.begin(), p.end(), 0.0);
  return z;
}

Tensor forward_features(const CnnModel& model, const Tensor& sample) {
  Tensor x = conv1d_forward(sample, model.conv1);
  relu_inplace(x.data);
  x = maxpool_forward(x).output;
  x = conv1d_forward(x, model.conv2);
  relu_inplace(x.data);
  x = maxpool_forward(x).output;
  return Tensor({1, x.size()}, std::move(x.data));
}

std::size_t infer_fc1_input_dim(const CnnArchitecture& arch) {
  // shape inference by probe, as with a dummy forward pass in a framework
  CnnModel m;
  m.arch = arch;
  m.conv1 = Conv1dLayer(1, arch.conv1_channels, arch.kernel_size, arch.stride, arch.padding);
  m.conv2 = Conv1dLayer(arch.conv1_channels, arch.conv2_channels, arch.kernel_size, arch.stride, arch.padding);
  const Tensor probe({1, arch.input_dim}, 1.0);
  try {
    return forward_features(m, probe).size();
  } catch (const Error& e) {
    throw Error(Errc::ShapeMismatch, "input_dim " + std::to_string(arch.input_dim) +
                                         " too short for the convolutional stack (" + e.what() + ")");
  }
}

CnnModel make_cnn(const CnnArchitecture& arch, std::uint64_t seed) {
  if (arch.num_classes < 2) throw Error(Errc::SingleClass, "cnn needs at least 2 classes");
  if (!(arch.dropout >= 0.0 && arch.dropout < 1.0)) throw Error(Errc::InvalidArgument, "dropout must lie in [0, 1)");
  CnnModel m;
  m.arch = arch;
  m.conv1 = Conv1dLayer(1, arch.conv1_channels, arch.kernel_size, arch.stride, arch.padding);
  m.conv2 = Conv1dLayer(arch.conv1_channels, arch.conv2_channels, arch.kernel_size, arch.stride, arch.padding);

  Rng rng(seed);
  init_uniform(m.conv1.weights, 1.0 / std::sqrt(static_cast<double>(arch.kernel_size)), rng);
  init_uniform(m.conv1.bias, 1.0 / std::sqrt(static_cast<double>(arch.kernel_size)), rng);
  const double conv2_bound = 1.0 / std::sqrt(static_cast<double>(arch.conv1_channels * arch.kernel_size));
  init_uniform(m.conv2.weights, conv2_bound, rng);
  init_uniform(m.conv2.bias, conv2_bound, rng);

  m.fc1_input_dim = infer_fc1_input_dim(arch);
  m.fc1 = DenseLayer(m.fc1_input_dim, arch.hidden);
  m.fc2 = DenseLayer(arch.hidden, arch.num_classes);
  const double fc1_bound = 1.0 / std::sqrt(static_cast<double>(m.fc1_input_dim));
  init_uniform(m.fc1.weights, fc1_bound, rng);
  init_uniform(m.fc1.bias, fc1_bound, rng);
  const double fc2_bound = 1.0 / std::sqrt(static_cast<double>(arch.hidden));
  init_uniform(m.fc2.weights, fc2_bound, rng);
  init_uniform(m.fc2.bias, fc2_bound, rng);
  return m;
}

std::vector<double> dropout_mask(std::uint64_t seed, std::size_t index, std::size_t width, double p) {
  Rng rng(mix_seed(seed, index));
  const double keep_scale = 1.0 / (1.0 - p);
  std::vector<double> mask(width);
  for (double& m : mask) m = uniform01(rng) < p ? 0.0 : keep_scale;
  return mask;
}

Tensor forward(const CnnModel& model, const Tensor& batch, bool training, std::uint64_t seed) {
  check_batch(model, batch);
  const std::size_t b = batch.dim(0);
  Tensor logits({b, model.arch.num_classes});
  for (std::size_t i = 0; i < b; ++i) {
    auto tr = run_sample(model, batch.row(i), training, seed, i);
    std::copy(tr.logits.begin(), tr.logits.end(), logits.row(i).begin());
  }
  return logits;
}

Tensor softmax(const Tensor& logits) {
  Tensor p = logits;
  const std::size_t k = logits.dim(1);
  for (std::size_t i = 0; i < logits.dim(0); ++i) {
    auto r = p.row(i);
    const double mx = *std::max_element(r.begin(), r.end());
    double sum = 0.0;
    for (double& v : r) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (std::size_t j = 0; j < k; ++j) r[j] /= sum;
  }
  return p;
}

CrossEntropyResult cross_entropy(const Tensor& logits, std::span<const int> labels) {
  if (logits.shape.size() != 2 || labels.size() != logits.dim(0)) {
    throw Error(Errc::ShapeMismatch, "cross_entropy: one label per logit row required");
  }
  const std::size_t b = logits.dim(0);
  const std::size_t k = logits.dim(1);
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= k) {
      throw Error(Errc::LabelOutOfRange, "label " + std::to_string(y) + " outside [0, " + std::to_string(k) + ")");
    }
  }

  CrossEntropyResult r{0.0, Tensor({b, k})};
  for (std::size_t i = 0; i < b; ++i) {
    auto z = logits.row(i);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    const double log_sum = mx + std::log(sum);
    const auto y = static_cast<std::size_t>(labels[i]);
    r.loss += log_sum - z[y];
    for (std::size_t j = 0; j < k; ++j) {
      const double p = std::exp(z[j] - log_sum);
      r.grad(i, j) = (p - (j == y ? 1.0 : 0.0)) / static_cast<double>(b);
    }
  }
  r.loss /= static_cast<double>(b);
  return r;
}

Gradients backward(const CnnModel& model, const Tensor& batch, std::span<const int> labels,
                   bool training, std::uint64_t seed) {
  check_batch(model, batch);
  const std::size_t b = batch.dim(0);
  if (labels.size() != b) throw Error(Errc::ShapeMismatch, "one label per batch row required");

  std::vector<Trace> traces;
  traces.reserve(b);
  Gradients out;
  out.logits = Tensor({b, model.arch.num_classes});
  for (std::size_t i = 0; i < b; ++i) {
    traces.push_back(run_sample(model, batch.row(i), training, seed, i));
    std::copy(traces.back().logits.begin(), traces.back().logits.end(), out.logits.row(i).begin());
  }
  auto ce = cross_entropy(out.logits, labels);
  out.loss = ce.loss;
  out.grads = model.zeros_like();
  CnnModel& g = out.grads;

  for (std::size_t i = 0; i < b; ++i) {
    const Trace& tr = traces[i];
    auto d_hidden = dense_backward(tr.hidden, model.fc2, ce.grad.row(i), g.fc2);
    for (std::size_t j = 0; j < d_hidden.size(); ++j) {
      if (!tr.mask.empty()) d_hidden[j] *= tr.mask[j];
      if (!(tr.fc1_pre[j] > 0.0)) d_hidden[j] = 0.0;
    }
    auto d_flat = dense_backward(tr.pool2.output.data, model.fc1, d_hidden, g.fc1);

    Tensor d_pool2(tr.pool2.output.shape, std::move(d_flat));
    Tensor d_conv2 = maxpool_backward(tr.pool2, d_pool2, tr.relu2.shape);
    for (std::size_t j = 0; j < d_conv2.size(); ++j) {
      if (!(tr.conv2_pre.data[j] > 0.0)) d_conv2.data[j] = 0.0;
    }
    Tensor d_pool1;
    conv1d_backward(tr.pool1.output, model.conv2, d_conv2, g.conv2, &d_pool1);

    Tensor d_conv1 = maxpool_backward(tr.pool1, d_pool1, tr.relu1.shape);
    for (std::size_t j = 0; j < d_conv1.size(); ++j) {
      if (!(tr.conv1_pre.data[j] > 0.0)) d_conv1.data[j] = 0.0;
    }
    conv1d_backward(tr.input, model.conv1, d_conv1, g.conv1, nullptr);
  }
  return out;
}

}  // namespace opc::neural
