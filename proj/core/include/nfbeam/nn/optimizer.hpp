#pragma once

#include <string>
#include <vector>

#include "nfbeam/nn/layers.hpp"

namespace nfbeam::nn {

enum class OptimizerKind { kAdam, kSgd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Multiplies the learning rate after every epoch.
  double epoch_decay = 0.95;
};

/// Adam or plain SGD over a fixed parameter list.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg) : cfg_(cfg), lr_(cfg.learning_rate) {}

  void step(const std::vector<Parameter*>& params);
  void end_epoch() { lr_ *= cfg_.epoch_decay; }

  double learning_rate() const { return lr_; }
  long steps() const { return t_; }

 private:
  OptimizerConfig cfg_;
  double lr_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace nfbeam::nn
