#include "nfbeam/predictor.hpp"

#include <stdexcept>

namespace nfbeam {

std::vector<double> NetworkPredictor::probabilities(const MeasurementVector& y) const {
  if (y.size() != model_->input_length()) {
    throw std::invalid_argument("NetworkPredictor: model expects " + std::to_string(model_->input_length()) +
                                " wide-beam values, got " + std::to_string(y.size()));
  }
  return model_->predict_one(nn::input_encode(y));
}

std::vector<double> OneHotPredictor::probabilities(const MeasurementVector&) const {
  if (hot_ < 1 || hot_ > classes_) throw std::out_of_range("OneHotPredictor: class out of range");
  std::vector<double> p(classes_, 0.0);
  p[hot_ - 1] = 1.0;
  return p;
}

}  // namespace nfbeam
