#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nfbeam/measurement.hpp"
#include "nfbeam/nn/layers.hpp"
#include "nfbeam/nn/tensor.hpp"

namespace nfbeam::nn {

enum class Pooling { kAverage, kFlatten };

/// Shape of the shared conv + fully-connected trunk. The defaults give
/// Conv(2->64) ReLU BN, Conv(64->256) ReLU BN, average pool,
/// FC(256->1024) ReLU BN, FC(1024->1024) ReLU BN, FC(1024->512) ReLU,
/// FC(512->head) Softmax.
struct NetConfig {
  std::vector<std::size_t> conv_channels{64, 256};
  std::size_t kernel_size = 3;
  std::size_t padding = 1;
  Pooling pooling = Pooling::kAverage;
  std::vector<std::size_t> hidden{1024, 1024, 512};
  /// hidden_batchnorm[i] adds a BatchNorm after hidden layer i's ReLU.
  std::vector<bool> hidden_batchnorm{true, true, false};
  bool conv_batchnorm = true;
};

/// Layer list for a classifier over (B, 2, input_length) with `head_size` classes.
std::vector<LayerSpec> make_architecture(const NetConfig& cfg, std::size_t input_length,
                                         std::size_t head_size);

/// Ordered layer stack ending in a softmax. Copyable (deep copy).
class NetworkModel {
 public:
  NetworkModel() = default;
  NetworkModel(const std::vector<LayerSpec>& specs, std::size_t input_length);
  NetworkModel(const NetworkModel& other);
  NetworkModel& operator=(const NetworkModel& other);
  NetworkModel(NetworkModel&&) noexcept = default;
  NetworkModel& operator=(NetworkModel&&) noexcept = default;

  /// Draws fresh weights.
  void initialize(Rng& rng);

  /// Training-mode forward pass over (B, 2, M); caches activations.
  Tensor forward(const Tensor& batch);
  /// Backpropagates dLoss/dProbabilities through the cached pass.
  void backward(const Tensor& grad_probabilities);
  /// Evaluation-mode pass with BatchNorm running statistics.
  Tensor predict(const Tensor& batch) const;
  /// Single encoded sample (2, M) -> class probabilities.
  std::vector<double> predict_one(const Tensor& sample) const;

  void zero_grad();
  std::vector<Parameter*> parameters();
  std::vector<Tensor*> buffers();

  std::vector<LayerSpec> specs() const;
  std::size_t input_length() const { return input_length_; }
  std::size_t head_size() const;
  std::size_t layer_count() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }

 private:
  void check_input(const Tensor& batch) const;

  std::vector<std::unique_ptr<Layer>> layers_;
  std::size_t input_length_ = 0;
};

NetworkModel build_network(const NetConfig& cfg, std::size_t input_length, std::size_t head_size,
                           Rng& rng);

/// (2, M) tensor: real parts then imaginary parts, standardized to zero mean
/// and unit standard deviation over all 2M values (std floored at 1e-8).
Tensor input_encode(std::span<const cdouble> values);
inline Tensor input_encode(const MeasurementVector& y) { return input_encode(y.values); }

/// Stacks encoded (2, M) samples into a (B, 2, M) batch.
Tensor stack(std::span<const Tensor> samples);

inline constexpr double kProbabilityFloor = 1e-12;

/// -log10(max(p[label], 1e-12)); label is 0-based.
double cross_entropy(std::span<const double> probabilities, std::size_t label);

/// Mean cross-entropy over a (B, K) probability batch; optionally writes
/// dLoss/dProbabilities into `grad`.
double mean_cross_entropy(const Tensor& probabilities, std::span<const std::uint32_t> labels,
                          Tensor* grad = nullptr);

/// Runs a training-mode forward and backward pass; parameter gradients hold
/// the gradient of the mean loss afterwards. Returns the mean loss.
double compute_gradients(NetworkModel& model, const Tensor& batch,
                         std::span<const std::uint32_t> labels);

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Binary model file: architecture header, parameters, BatchNorm running
/// statistics and an FNV-1a checksum of everything before it.
void save_model(const NetworkModel& model, const std::filesystem::path& path);
NetworkModel load_model(const std::filesystem::path& path);
std::vector<unsigned char> serialize_model(const NetworkModel& model);
NetworkModel deserialize_model(std::vector<unsigned char> bytes);

}  // namespace nfbeam::nn
