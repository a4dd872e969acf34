#pragma once

#include <cstddef>
#include <vector>

#include "nfbeam/measurement.hpp"
#include "nfbeam/nn/network.hpp"

namespace nfbeam {

/// Maps a wide-beam measurement vector to a class probability vector.
/// The direction head has N classes and the distance head has S.
class HeadPredictor {
 public:
  virtual ~HeadPredictor() = default;
  virtual std::vector<double> probabilities(const MeasurementVector& y) const = 0;
  virtual std::size_t classes() const = 0;
};

/// Trained network in evaluation mode.
class NetworkPredictor final : public HeadPredictor {
 public:
  explicit NetworkPredictor(const nn::NetworkModel& model) : model_(&model) {}
  std::vector<double> probabilities(const MeasurementVector& y) const override;
  std::size_t classes() const override { return model_->head_size(); }

 private:
  const nn::NetworkModel* model_;
};

/// Puts all mass on one 1-based class.
class OneHotPredictor final : public HeadPredictor {
 public:
  OneHotPredictor(std::size_t classes, std::size_t hot) : classes_(classes), hot_(hot) {}
  std::vector<double> probabilities(const MeasurementVector&) const override;
  std::size_t classes() const override { return classes_; }

 private:
  std::size_t classes_, hot_;
};

class UniformPredictor final : public HeadPredictor {
 public:
  explicit UniformPredictor(std::size_t classes) : classes_(classes) {}
  std::vector<double> probabilities(const MeasurementVector&) const override {
    return std::vector<double>(classes_, 1.0 / static_cast<double>(classes_));
  }
  std::size_t classes() const override { return classes_; }

 private:
  std::size_t classes_;
};

/// Returns the same vector for every input.
class FixedPredictor final : public HeadPredictor {
 public:
  explicit FixedPredictor(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probabilities(const MeasurementVector&) const override { return probs_; }
  std::size_t classes() const override { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

}  // namespace nfbeam
