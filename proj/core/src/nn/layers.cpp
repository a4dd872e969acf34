#include "nfbeam/nn/layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nfbeam::nn {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMatrix>;
using ConstMatMap = Eigen::Map<const RowMatrix>;
using Index = Eigen::Index;

Index ix(std::size_t v) { return static_cast<Index>(v); }

Parameter make_parameter(std::string name, std::vector<std::size_t> shape) {
  Tensor value(shape);
  Tensor grad(std::move(shape));
  return {std::move(name), std::move(value), std::move(grad)};
}

void require_rank(const Tensor& x, std::size_t rank, const char* who) {
  if (x.rank() != rank) {
    throw std::invalid_argument(std::string(who) + ": expected rank " + std::to_string(rank) +
                                " input, got " + x.shape_string());
  }
}

}  // namespace

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv1D: return "Conv1D";
    case LayerKind::kReLU: return "ReLU";
    case LayerKind::kBatchNorm: return "BatchNorm";
    case LayerKind::kAvgPool: return "AvgPool";
    case LayerKind::kDense: return "Dense";
    case LayerKind::kSoftmax: return "Softmax";
    case LayerKind::kFlatten: return "Flatten";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- Conv1D

Conv1D::Conv1D(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
               std::size_t padding)
    : in_(in_channels),
      out_(out_channels),
      kernel_(kernel),
      padding_(padding),
      weight_(make_parameter("conv.weight", {out_channels, in_channels * kernel})),
      bias_(make_parameter("conv.bias", {out_channels})) {
  if (in_ == 0 || out_ == 0 || kernel_ == 0) throw std::invalid_argument("Conv1D: zero dimension");
}

LayerSpec Conv1D::spec() const { return {LayerKind::kConv1D, in_, out_, kernel_, padding_}; }

namespace {

struct ConvGeometry {
  std::size_t batch, length, out_length, rows, cols;
};

ConvGeometry conv_geometry(const Tensor& x, std::size_t in, std::size_t kernel, std::size_t padding) {
  require_rank(x, 3, "Conv1D");
  if (x.dim(1) != in) {
    throw std::invalid_argument("Conv1D: expected " + std::to_string(in) + " input channels, got " +
                                x.shape_string());
  }
  const std::size_t length = x.dim(2);
  if (length + 2 * padding < kernel) throw std::invalid_argument("Conv1D: input shorter than kernel");
  const std::size_t out_length = length + 2 * padding - kernel + 1;
  return {x.dim(0), length, out_length, in * kernel, x.dim(0) * out_length};
}

// cols is (C_in*K) x (B*L'), row r = c*K + k, column b*L' + t.
void im2col(const Tensor& x, const ConvGeometry& g, std::size_t in, std::size_t kernel,
            std::size_t padding, Buffer& cols) {
  cols.assign(g.rows * g.cols, 0.0);
  const double* src = x.data();
  for (std::size_t c = 0; c < in; ++c) {
    for (std::size_t k = 0; k < kernel; ++k) {
      double* row = cols.data() + (c * kernel + k) * g.cols;
      for (std::size_t b = 0; b < g.batch; ++b) {
        const double* xin = src + (b * in + c) * g.length;
        double* dst = row + b * g.out_length;
        for (std::size_t t = 0; t < g.out_length; ++t) {
          const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(t + k) -
                                     static_cast<std::ptrdiff_t>(padding);
          if (pos >= 0 && pos < static_cast<std::ptrdiff_t>(g.length)) dst[t] = xin[pos];
        }
      }
    }
  }
}

Tensor conv_apply(const Tensor& x, const ConvGeometry& g, const Buffer& cols,
                  const Parameter& weight, const Parameter& bias, std::size_t out) {
  RowMatrix result = ConstMatMap(weight.value.data(), ix(out), ix(g.rows)) *
                     ConstMatMap(cols.data(), ix(g.rows), ix(g.cols));
  Tensor y({g.batch, out, g.out_length});
  for (std::size_t o = 0; o < out; ++o) {
    const double b = bias.value[o];
    for (std::size_t n = 0; n < g.batch; ++n) {
      double* dst = y.data() + (n * out + o) * g.out_length;
      const double* src = result.data() + o * g.cols + n * g.out_length;
      for (std::size_t t = 0; t < g.out_length; ++t) dst[t] = src[t] + b;
    }
  }
  (void)x;
  return y;
}

}  // namespace

Tensor Conv1D::forward(const Tensor& x) {
  const ConvGeometry g = conv_geometry(x, in_, kernel_, padding_);
  im2col(x, g, in_, kernel_, padding_, cols_);
  in_shape_ = x.shape();
  return conv_apply(x, g, cols_, weight_, bias_, out_);
}

Tensor Conv1D::infer(const Tensor& x) const {
  const ConvGeometry g = conv_geometry(x, in_, kernel_, padding_);
  Buffer cols;
  im2col(x, g, in_, kernel_, padding_, cols);
  return conv_apply(x, g, cols, weight_, bias_, out_);
}

Tensor Conv1D::backward(const Tensor& grad_out) {
  const std::size_t batch = in_shape_.at(0);
  const std::size_t length = in_shape_.at(2);
  const std::size_t out_length = length + 2 * padding_ - kernel_ + 1;
  const std::size_t rows = in_ * kernel_;
  const std::size_t cols = batch * out_length;
  if (grad_out.shape() != std::vector<std::size_t>{batch, out_, out_length}) {
    throw std::invalid_argument("Conv1D::backward: gradient shape mismatch");
  }
  // Rearrange dY to (C_out, B*L').
  RowMatrix dy(ix(out_), ix(cols));
  for (std::size_t o = 0; o < out_; ++o) {
    for (std::size_t n = 0; n < batch; ++n) {
      const double* src = grad_out.data() + (n * out_ + o) * out_length;
      for (std::size_t t = 0; t < out_length; ++t) dy(ix(o), ix(n * out_length + t)) = src[t];
    }
  }
  ConstMatMap col_mat(cols_.data(), ix(rows), ix(cols));
  MatMap(weight_.grad.data(), ix(out_), ix(rows)).noalias() += dy * col_mat.transpose();
  for (std::size_t o = 0; o < out_; ++o) bias_.grad[o] += dy.row(ix(o)).sum();

  const RowMatrix dcols = ConstMatMap(weight_.value.data(), ix(out_), ix(rows)).transpose() * dy;
  Tensor dx(in_shape_);
  for (std::size_t c = 0; c < in_; ++c) {
    for (std::size_t k = 0; k < kernel_; ++k) {
      const double* row = dcols.data() + (c * kernel_ + k) * cols;
      for (std::size_t n = 0; n < batch; ++n) {
        double* dst = dx.data() + (n * in_ + c) * length;
        const double* src = row + n * out_length;
        for (std::size_t t = 0; t < out_length; ++t) {
          const std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(t + k) -
                                     static_cast<std::ptrdiff_t>(padding_);
          if (pos >= 0 && pos < static_cast<std::ptrdiff_t>(length)) dst[pos] += src[t];
        }
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------- Dense

Dense::Dense(std::size_t in_features, std::size_t out_features)
    : in_(in_features),
      out_(out_features),
      weight_(make_parameter("dense.weight", {out_features, in_features})),
      bias_(make_parameter("dense.bias", {out_features})) {
  if (in_ == 0 || out_ == 0) throw std::invalid_argument("Dense: zero dimension");
}

namespace {

Tensor dense_apply(const Tensor& x, const Parameter& weight, const Parameter& bias, std::size_t in,
                   std::size_t out) {
  require_rank(x, 2, "Dense");
  if (x.dim(1) != in) {
    throw std::invalid_argument("Dense: expected " + std::to_string(in) + " features, got " +
                                x.shape_string());
  }
  const std::size_t batch = x.dim(0);
  Tensor y({batch, out});
  MatMap ym(y.data(), ix(batch), ix(out));
  ym.noalias() = ConstMatMap(x.data(), ix(batch), ix(in)) *
                 ConstMatMap(weight.value.data(), ix(out), ix(in)).transpose();
  ym.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias.value.data(), ix(out));
  return y;
}

}  // namespace

Tensor Dense::forward(const Tensor& x) {
  Tensor y = dense_apply(x, weight_, bias_, in_, out_);
  input_ = x;
  return y;
}

Tensor Dense::infer(const Tensor& x) const { return dense_apply(x, weight_, bias_, in_, out_); }

Tensor Dense::backward(const Tensor& grad_out) {
  const std::size_t batch = input_.dim(0);
  if (grad_out.shape() != std::vector<std::size_t>{batch, out_}) {
    throw std::invalid_argument("Dense::backward: gradient shape mismatch");
  }
  ConstMatMap dy(grad_out.data(), ix(batch), ix(out_));
  ConstMatMap xm(input_.data(), ix(batch), ix(in_));
  MatMap(weight_.grad.data(), ix(out_), ix(in_)).noalias() += dy.transpose() * xm;
  Eigen::Map<Eigen::RowVectorXd>(bias_.grad.data(), ix(out_)) += dy.colwise().sum();
  Tensor dx({batch, in_});
  MatMap(dx.data(), ix(batch), ix(in_)).noalias() =
      dy * ConstMatMap(weight_.value.data(), ix(out_), ix(in_));
  return dx;
}

// ---------------------------------------------------------------- ReLU

Tensor ReLU::infer(const Tensor& x) const {
  Tensor y = x;
  for (double& v : y.values()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor ReLU::forward(const Tensor& x) {
  output_ = infer(x);
  return output_;
}

Tensor ReLU::backward(const Tensor& grad_out) {
  if (grad_out.shape() != output_.shape()) throw std::invalid_argument("ReLU::backward: shape mismatch");
  Tensor dx = grad_out;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (!(output_[i] > 0.0)) dx[i] = 0.0;
  }
  return dx;
}

// ---------------------------------------------------------------- BatchNorm

BatchNorm::BatchNorm(std::size_t channels, double momentum, double eps)
    : channels_(channels),
      momentum_(momentum),
      eps_(eps),
      gamma_(make_parameter("bn.gamma", {channels})),
      beta_(make_parameter("bn.beta", {channels})),
      running_mean_({channels}, 0.0),
      running_var_({channels}, 1.0) {
  gamma_.value.fill(1.0);
}

namespace {

// (B, C) is treated as (B, C, 1).
struct BnLayout {
  std::size_t batch, channels, length;
};

BnLayout bn_layout(const Tensor& x, std::size_t channels) {
  if ((x.rank() != 2 && x.rank() != 3) || x.dim(1) != channels) {
    throw std::invalid_argument("BatchNorm: expected (B, " + std::to_string(channels) +
                                "[, L]) input, got " + x.shape_string());
  }
  return {x.dim(0), channels, x.rank() == 3 ? x.dim(2) : 1};
}

}  // namespace

Tensor BatchNorm::forward(const Tensor& x) {
  const BnLayout g = bn_layout(x, channels_);
  const double count = static_cast<double>(g.batch * g.length);
  Tensor y(x.shape());
  xhat_ = Tensor(x.shape());
  inv_std_.assign(channels_, 0.0);
  for (std::size_t c = 0; c < channels_; ++c) {
    double mean = 0.0;
    for (std::size_t b = 0; b < g.batch; ++b) {
      const double* p = x.data() + (b * channels_ + c) * g.length;
      for (std::size_t t = 0; t < g.length; ++t) mean += p[t];
    }
    mean /= count;
    double var = 0.0;
    for (std::size_t b = 0; b < g.batch; ++b) {
      const double* p = x.data() + (b * channels_ + c) * g.length;
      for (std::size_t t = 0; t < g.length; ++t) var += (p[t] - mean) * (p[t] - mean);
    }
    var /= count;
    const double inv_std = 1.0 / std::sqrt(var + eps_);
    inv_std_[c] = inv_std;
    for (std::size_t b = 0; b < g.batch; ++b) {
      const std::size_t off = (b * channels_ + c) * g.length;
      for (std::size_t t = 0; t < g.length; ++t) {
        const double xh = (x[off + t] - mean) * inv_std;
        xhat_[off + t] = xh;
        y[off + t] = gamma_.value[c] * xh + beta_.value[c];
      }
    }
    const double unbiased = count > 1.0 ? var * count / (count - 1.0) : var;
    running_mean_[c] = (1.0 - momentum_) * running_mean_[c] + momentum_ * mean;
    running_var_[c] = (1.0 - momentum_) * running_var_[c] + momentum_ * unbiased;
  }
  return y;
}

Tensor BatchNorm::infer(const Tensor& x) const {
  const BnLayout g = bn_layout(x, channels_);
  Tensor y(x.shape());
  for (std::size_t c = 0; c < channels_; ++c) {
    const double scale = gamma_.value[c] / std::sqrt(running_var_[c] + eps_);
    const double shift = beta_.value[c] - running_mean_[c] * scale;
    for (std::size_t b = 0; b < g.batch; ++b) {
      const std::size_t off = (b * channels_ + c) * g.length;
      for (std::size_t t = 0; t < g.length; ++t) y[off + t] = x[off + t] * scale + shift;
    }
  }
  return y;
}

Tensor BatchNorm::backward(const Tensor& grad_out) {
  if (grad_out.shape() != xhat_.shape()) throw std::invalid_argument("BatchNorm::backward: shape mismatch");
  const BnLayout g = bn_layout(grad_out, channels_);
  const double count = static_cast<double>(g.batch * g.length);
  Tensor dx(grad_out.shape());
  for (std::size_t c = 0; c < channels_; ++c) {
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (std::size_t b = 0; b < g.batch; ++b) {
      const std::size_t off = (b * channels_ + c) * g.length;
      for (std::size_t t = 0; t < g.length; ++t) {
        sum_dy += grad_out[off + t];
        sum_dy_xhat += grad_out[off + t] * xhat_[off + t];
      }
    }
    gamma_.grad[c] += sum_dy_xhat;
    beta_.grad[c] += sum_dy;
    const double k = gamma_.value[c] * inv_std_[c] / count;
    for (std::size_t b = 0; b < g.batch; ++b) {
      const std::size_t off = (b * channels_ + c) * g.length;
      for (std::size_t t = 0; t < g.length; ++t) {
        dx[off + t] = k * (count * grad_out[off + t] - sum_dy - xhat_[off + t] * sum_dy_xhat);
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------- AvgPool

Tensor AvgPool::infer(const Tensor& x) const {
  require_rank(x, 3, "AvgPool");
  const std::size_t batch = x.dim(0), channels = x.dim(1), length = x.dim(2);
  Tensor y({batch, channels});
  for (std::size_t i = 0; i < batch * channels; ++i) {
    double s = 0.0;
    for (std::size_t t = 0; t < length; ++t) s += x[i * length + t];
    y[i] = s / static_cast<double>(length);
  }
  return y;
}

Tensor AvgPool::forward(const Tensor& x) {
  Tensor y = infer(x);
  in_shape_ = x.shape();
  return y;
}

Tensor AvgPool::backward(const Tensor& grad_out) {
  const std::size_t length = in_shape_.at(2);
  Tensor dx(in_shape_);
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    const double g = grad_out[i] / static_cast<double>(length);
    for (std::size_t t = 0; t < length; ++t) dx[i * length + t] = g;
  }
  return dx;
}

// ---------------------------------------------------------------- Flatten

Tensor Flatten::infer(const Tensor& x) const {
  if (x.rank() < 2) throw std::invalid_argument("Flatten: need rank >= 2");
  return x.reshaped({x.dim(0), x.size() / std::max<std::size_t>(x.dim(0), 1)});
}

Tensor Flatten::forward(const Tensor& x) {
  in_shape_ = x.shape();
  return infer(x);
}

Tensor Flatten::backward(const Tensor& grad_out) { return grad_out.reshaped(in_shape_); }

// ---------------------------------------------------------------- Softmax

Tensor Softmax::infer(const Tensor& x) const {
  require_rank(x, 2, "Softmax");
  const std::size_t batch = x.dim(0), classes = x.dim(1);
  Tensor y(x.shape());
  for (std::size_t b = 0; b < batch; ++b) {
    const double* in = x.data() + b * classes;
    double* out = y.data() + b * classes;
    const double peak = *std::max_element(in, in + classes);
    double total = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      out[k] = std::exp(in[k] - peak);
      total += out[k];
    }
    for (std::size_t k = 0; k < classes; ++k) out[k] /= total;
  }
  return y;
}

Tensor Softmax::forward(const Tensor& x) {
  output_ = infer(x);
  return output_;
}

Tensor Softmax::backward(const Tensor& grad_out) {
  if (grad_out.shape() != output_.shape()) throw std::invalid_argument("Softmax::backward: shape mismatch");
  const std::size_t batch = output_.dim(0), classes = output_.dim(1);
  Tensor dx(output_.shape());
  for (std::size_t b = 0; b < batch; ++b) {
    const double* p = output_.data() + b * classes;
    const double* g = grad_out.data() + b * classes;
    double dot = 0.0;
    for (std::size_t k = 0; k < classes; ++k) dot += p[k] * g[k];
    for (std::size_t k = 0; k < classes; ++k) dx[b * classes + k] = p[k] * (g[k] - dot);
  }
  return dx;
}

// ---------------------------------------------------------------- factory

std::unique_ptr<Layer> make_layer(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::kConv1D: return std::make_unique<Conv1D>(spec.in, spec.out, spec.kernel, spec.padding);
    case LayerKind::kReLU: return std::make_unique<ReLU>();
    case LayerKind::kBatchNorm: return std::make_unique<BatchNorm>(spec.in);
    case LayerKind::kAvgPool: return std::make_unique<AvgPool>();
    case LayerKind::kDense: return std::make_unique<Dense>(spec.in, spec.out);
    case LayerKind::kSoftmax: return std::make_unique<Softmax>();
    case LayerKind::kFlatten: return std::make_unique<Flatten>();
  }
  throw std::invalid_argument("make_layer: unknown layer kind");
}

void initialize(Layer& layer, Rng& rng) {
  const LayerSpec s = layer.spec();
  auto glorot = [&rng](Tensor& w, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& v : w.values()) v = rng.uniform(-limit, limit);
  };
  if (s.kind == LayerKind::kConv1D) {
    auto& conv = static_cast<Conv1D&>(layer);
    glorot(conv.weight().value, static_cast<double>(s.in * s.kernel), static_cast<double>(s.out * s.kernel));
    conv.bias().value.fill(0.0);
  } else if (s.kind == LayerKind::kDense) {
    auto& dense = static_cast<Dense&>(layer);
    glorot(dense.weight().value, static_cast<double>(s.in), static_cast<double>(s.out));
    dense.bias().value.fill(0.0);
  } else if (s.kind == LayerKind::kBatchNorm) {
    auto params = layer.parameters();
    params[0]->value.fill(1.0);
    params[1]->value.fill(0.0);
  }
}

}  // namespace nfbeam::nn
