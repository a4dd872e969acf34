#include "nfbeam/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace nfbeam::nn {

void Optimizer::step(const std::vector<Parameter*>& params) {
  ++t_;
  if (cfg_.kind == OptimizerKind::kSgd) {
    for (Parameter* p : params) {
      for (std::size_t i = 0; i < p->value.size(); ++i) p->value[i] -= lr_ * p->grad[i];
    }
    return;
  }
  if (m_.empty()) {
    for (Parameter* p : params) {
      m_.emplace_back(p->value.size(), 0.0);
      v_.emplace_back(p->value.size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw std::invalid_argument("Optimizer: parameter list changed");
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    auto& m = m_[k];
    auto& v = v_[k];
    if (m.size() != p.value.size()) throw std::invalid_argument("Optimizer: parameter shape changed");
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double g = p.grad[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      p.value[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.epsilon);
    }
  }
}

}  // namespace nfbeam::nn
