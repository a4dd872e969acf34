#include "nfbeam/nn/network.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nfbeam::nn {

std::vector<LayerSpec> make_architecture(const NetConfig& cfg, std::size_t input_length,
                                         std::size_t head_size) {
  if (input_length == 0 || head_size == 0) {
    throw std::invalid_argument("make_architecture: input length and head size must be positive");
  }
  if (cfg.hidden_batchnorm.size() != cfg.hidden.size()) {
    throw std::invalid_argument("make_architecture: hidden_batchnorm must match hidden");
  }
  std::vector<LayerSpec> specs;
  std::size_t channels = 2;
  std::size_t length = input_length;
  for (std::size_t out : cfg.conv_channels) {
    specs.push_back({LayerKind::kConv1D, channels, out, cfg.kernel_size, cfg.padding});
    if (length + 2 * cfg.padding < cfg.kernel_size) {
      throw std::invalid_argument("make_architecture: input too short for the conv kernel");
    }
    length = length + 2 * cfg.padding - cfg.kernel_size + 1;
    specs.push_back({LayerKind::kReLU});
    if (cfg.conv_batchnorm) specs.push_back({LayerKind::kBatchNorm, out, out});
    channels = out;
  }
  std::size_t features = channels;
  if (cfg.conv_channels.empty() || cfg.pooling == Pooling::kFlatten) {
    specs.push_back({LayerKind::kFlatten});
    features = channels * length;
  } else {
    specs.push_back({LayerKind::kAvgPool});
  }
  for (std::size_t i = 0; i < cfg.hidden.size(); ++i) {
    specs.push_back({LayerKind::kDense, features, cfg.hidden[i]});
    specs.push_back({LayerKind::kReLU});
    if (cfg.hidden_batchnorm[i]) specs.push_back({LayerKind::kBatchNorm, cfg.hidden[i], cfg.hidden[i]});
    features = cfg.hidden[i];
  }
  specs.push_back({LayerKind::kDense, features, head_size});
  specs.push_back({LayerKind::kSoftmax});
  return specs;
}

NetworkModel::NetworkModel(const std::vector<LayerSpec>& specs, std::size_t input_length)
    : input_length_(input_length) {
  if (specs.empty() || specs.back().kind != LayerKind::kSoftmax) {
    throw std::invalid_argument("NetworkModel: architecture must end in a softmax");
  }
  for (const LayerSpec& s : specs) layers_.push_back(make_layer(s));
  // Shape-check the stack once with a dummy sample.
  (void)predict(Tensor({1, 2, input_length}));
}

NetworkModel::NetworkModel(const NetworkModel& other) : input_length_(other.input_length_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

NetworkModel& NetworkModel::operator=(const NetworkModel& other) {
  if (this != &other) {
    NetworkModel copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void NetworkModel::initialize(Rng& rng) {
  for (auto& l : layers_) nn::initialize(*l, rng);
}

void NetworkModel::check_input(const Tensor& batch) const {
  if (batch.rank() != 3 || batch.dim(1) != 2 || batch.dim(2) != input_length_) {
    throw std::invalid_argument("NetworkModel: expected input (B, 2, " + std::to_string(input_length_) +
                                "), got " + batch.shape_string());
  }
}

Tensor NetworkModel::forward(const Tensor& batch) {
  check_input(batch);
  Tensor x = batch;
  for (auto& l : layers_) x = l->forward(x);
  return x;
}

void NetworkModel::backward(const Tensor& grad_probabilities) {
  Tensor g = grad_probabilities;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
}

Tensor NetworkModel::predict(const Tensor& batch) const {
  check_input(batch);
  Tensor x = batch;
  for (const auto& l : layers_) x = l->infer(x);
  return x;
}

std::vector<double> NetworkModel::predict_one(const Tensor& sample) const {
  const Tensor p = predict(sample.reshaped({1, 2, input_length_}));
  return {p.values().begin(), p.values().end()};
}

void NetworkModel::zero_grad() {
  for (Parameter* p : parameters()) p->grad.fill(0.0);
}

std::vector<Parameter*> NetworkModel::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_) {
    for (Parameter* p : l->parameters()) out.push_back(p);
  }
  return out;
}

std::vector<Tensor*> NetworkModel::buffers() {
  std::vector<Tensor*> out;
  for (auto& l : layers_) {
    for (Tensor* b : l->buffers()) out.push_back(b);
  }
  return out;
}

std::vector<LayerSpec> NetworkModel::specs() const {
  std::vector<LayerSpec> out;
  for (const auto& l : layers_) out.push_back(l->spec());
  return out;
}

std::size_t NetworkModel::head_size() const {
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    const LayerSpec s = (*it)->spec();
    if (s.kind == LayerKind::kDense) return s.out;
  }
  return 0;
}

NetworkModel build_network(const NetConfig& cfg, std::size_t input_length, std::size_t head_size,
                           Rng& rng) {
  NetworkModel model(make_architecture(cfg, input_length, head_size), input_length);
  model.initialize(rng);
  return model;
}

Tensor input_encode(std::span<const cdouble> values) {
  const std::size_t m = values.size();
  Tensor t({2, m});
  for (std::size_t i = 0; i < m; ++i) {
    t[i] = values[i].real();
    t[m + i] = values[i].imag();
  }
  if (m == 0) return t;
  const double count = static_cast<double>(2 * m);
  double mean = 0.0;
  for (double v : t.values()) mean += v;
  mean /= count;
  double var = 0.0;
  for (double v : t.values()) var += (v - mean) * (v - mean);
  const double sd = std::max(std::sqrt(var / count), 1e-8);
  for (double& v : t.values()) v = (v - mean) / sd;
  return t;
}

Tensor stack(std::span<const Tensor> samples) {
  if (samples.empty()) throw std::invalid_argument("stack: no samples");
  const auto& shape = samples.front().shape();
  std::vector<std::size_t> out_shape{samples.size()};
  out_shape.insert(out_shape.end(), shape.begin(), shape.end());
  Tensor out(out_shape);
  const std::size_t per = samples.front().size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].shape() != shape) throw std::invalid_argument("stack: inconsistent sample shapes");
    std::copy(samples[i].values().begin(), samples[i].values().end(), out.values().begin() + i * per);
  }
  return out;
}

double cross_entropy(std::span<const double> probabilities, std::size_t label) {
  if (label >= probabilities.size()) throw std::out_of_range("cross_entropy: label out of range");
  return -std::log10(std::max(probabilities[label], kProbabilityFloor));
}

double mean_cross_entropy(const Tensor& probabilities, std::span<const std::uint32_t> labels,
                          Tensor* grad) {
  if (probabilities.rank() != 2 || probabilities.dim(0) != labels.size()) {
    throw std::invalid_argument("mean_cross_entropy: batch/label count mismatch");
  }
  const std::size_t batch = probabilities.dim(0), classes = probabilities.dim(1);
  if (grad) *grad = Tensor(probabilities.shape());
  double total = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    std::span<const double> row(probabilities.data() + b * classes, classes);
    total += cross_entropy(row, labels[b]);
    if (grad) {
      const double p = row[labels[b]];
      if (p >= kProbabilityFloor) {
        (*grad)[b * classes + labels[b]] =
            -1.0 / (p * std::numbers::ln10 * static_cast<double>(batch));
      }
    }
  }
  return total / static_cast<double>(batch);
}

double compute_gradients(NetworkModel& model, const Tensor& batch,
                         std::span<const std::uint32_t> labels) {
  model.zero_grad();
  const Tensor probs = model.forward(batch);
  Tensor grad;
  const double loss = mean_cross_entropy(probs, labels, &grad);
  model.backward(grad);
  return loss;
}

}  // namespace nfbeam::nn
