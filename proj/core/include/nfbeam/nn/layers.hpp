#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nfbeam/nn/tensor.hpp"
#include "nfbeam/rng.hpp"

namespace nfbeam::nn {

enum class LayerKind : std::uint32_t {
  kConv1D = 1,
  kReLU = 2,
  kBatchNorm = 3,
  kAvgPool = 4,  ///< average over the length axis: (B, C, L) -> (B, C)
  kDense = 5,
  kSoftmax = 6,
  kFlatten = 7,  ///< (B, C, L) -> (B, C*L)
};

std::string to_string(LayerKind kind);

/// Architecture description of one layer. Unused fields stay zero.
struct LayerSpec {
  LayerKind kind = LayerKind::kReLU;
  std::size_t in = 0;   ///< input channels / features (BatchNorm: channels)
  std::size_t out = 0;  ///< output channels / features
  std::size_t kernel = 0;
  std::size_t padding = 0;

  bool operator==(const LayerSpec&) const = default;
};

/// Trainable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
};

/// Base layer. forward() caches what backward() needs; infer() is the
/// stateless evaluation path (BatchNorm uses running statistics there).
class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerSpec spec() const = 0;
  virtual Tensor forward(const Tensor& x) = 0;
  /// Takes dLoss/dOutput of the last forward(), accumulates parameter
  /// gradients and returns dLoss/dInput.
  virtual Tensor backward(const Tensor& grad_out) = 0;
  virtual Tensor infer(const Tensor& x) const = 0;

  virtual std::vector<Parameter*> parameters() { return {}; }
  /// Non-trainable state saved with the model (BatchNorm running stats).
  virtual std::vector<Tensor*> buffers() { return {}; }
  virtual std::unique_ptr<Layer> clone() const = 0;
};

/// 1-D convolution with stride 1 over (B, C_in, L) -> (B, C_out, L').
class Conv1D final : public Layer {
 public:
  Conv1D(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t padding);

  LayerSpec spec() const override;
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv1D>(*this); }

  Parameter& weight() { return weight_; }  ///< (C_out, C_in * K)
  Parameter& bias() { return bias_; }

 private:
  std::size_t in_, out_, kernel_, padding_;
  Parameter weight_, bias_;
  Buffer cols_;  // im2col of the cached input
  std::vector<std::size_t> in_shape_;
};

class Dense final : public Layer {
 public:
  Dense(std::size_t in_features, std::size_t out_features);

  LayerSpec spec() const override { return {LayerKind::kDense, in_, out_, 0, 0}; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }

  Parameter& weight() { return weight_; }  ///< (out, in)
  Parameter& bias() { return bias_; }

 private:
  std::size_t in_, out_;
  Parameter weight_, bias_;
  Tensor input_;
};

class ReLU final : public Layer {
 public:
  LayerSpec spec() const override { return {LayerKind::kReLU}; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ReLU>(*this); }
  /// Output of the last training-mode forward pass.
  const Tensor& output() const { return output_; }

 private:
  Tensor output_;
};

/// Per-channel batch normalization of (B, C) or (B, C, L) inputs.
class BatchNorm final : public Layer {
 public:
  explicit BatchNorm(std::size_t channels, double momentum = 0.1, double eps = 1e-5);

  LayerSpec spec() const override { return {LayerKind::kBatchNorm, channels_, channels_, 0, 0}; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;
  std::vector<Parameter*> parameters() override { return {&gamma_, &beta_}; }
  std::vector<Tensor*> buffers() override { return {&running_mean_, &running_var_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<BatchNorm>(*this); }

  const Tensor& running_mean() const { return running_mean_; }
  const Tensor& running_var() const { return running_var_; }

 private:
  std::size_t channels_;
  double momentum_, eps_;
  Parameter gamma_, beta_;
  Tensor running_mean_, running_var_;
  Tensor xhat_;
  std::vector<double> inv_std_;
};

class AvgPool final : public Layer {
 public:
  LayerSpec spec() const override { return {LayerKind::kAvgPool}; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<AvgPool>(*this); }

 private:
  std::vector<std::size_t> in_shape_;
};

class Flatten final : public Layer {
 public:
  LayerSpec spec() const override { return {LayerKind::kFlatten}; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Flatten>(*this); }

 private:
  std::vector<std::size_t> in_shape_;
};

/// Row-wise softmax over (B, K).
class Softmax final : public Layer {
 public:
  LayerSpec spec() const override { return {LayerKind::kSoftmax}; }
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& grad_out) override;
  Tensor infer(const Tensor& x) const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Softmax>(*this); }

 private:
  Tensor output_;
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec);

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases;
/// BatchNorm gets gamma = 1, beta = 0.
void initialize(Layer& layer, Rng& rng);

}  // namespace nfbeam::nn
