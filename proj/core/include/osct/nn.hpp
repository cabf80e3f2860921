#pragma once

// Small dense ReLU network with manual backprop, plus Adam. Header-only so the
// gradient check can instantiate it in double precision.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "osct/ids.hpp"

namespace osct::nn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct Layer {
  Matrix<Scalar> weight;  // out x in
  Vector<Scalar> bias;    // out
};

template <typename Scalar>
struct Gradients {
  std::vector<Matrix<Scalar>> weight;
  std::vector<Vector<Scalar>> bias;

  Scalar squared_norm() const {
    Scalar s = 0;
    for (const auto& w : weight) s += w.squaredNorm();
    for (const auto& b : bias) s += b.squaredNorm();
    return s;
  }
  void scale(Scalar k) {
    for (auto& w : weight) w *= k;
    for (auto& b : bias) b *= k;
  }
};

// Columns are samples. Hidden layers use ReLU; the output layer is linear.
template <typename Scalar>
class Mlp {
 public:
  struct Tape {
    std::vector<Matrix<Scalar>> inputs;  // input to each layer
    std::vector<Matrix<Scalar>> pre;     // pre-activation of each layer
  };

  Mlp() = default;

  Mlp(const std::vector<int>& sizes, std::mt19937_64& rng) : sizes_(sizes) {
    if (sizes.size() < 2) throw Error(ErrorKind::InvalidArgument, "network needs input and output sizes");
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      if (sizes[l] <= 0 || sizes[l + 1] <= 0) throw Error(ErrorKind::InvalidArgument, "layer width must be positive");
      // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)), the usual linear-layer default.
      const double bound = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
      std::uniform_real_distribution<double> u(-bound, bound);
      Layer<Scalar> layer{Matrix<Scalar>(sizes[l + 1], sizes[l]), Vector<Scalar>(sizes[l + 1])};
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = static_cast<Scalar>(u(rng));
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = static_cast<Scalar>(u(rng));
      layers_.push_back(std::move(layer));
    }
  }

  const std::vector<int>& sizes() const noexcept { return sizes_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  std::vector<Layer<Scalar>>& layers() noexcept { return layers_; }
  const std::vector<Layer<Scalar>>& layers() const noexcept { return layers_; }

  Matrix<Scalar> forward(const Matrix<Scalar>& x) const {
    Matrix<Scalar> h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Matrix<Scalar> z = layers_[l].weight * h;
      z.colwise() += layers_[l].bias;
      h = (l + 1 < layers_.size()) ? Matrix<Scalar>(z.cwiseMax(Scalar(0))) : z;
    }
    return h;
  }

  Matrix<Scalar> forward(const Matrix<Scalar>& x, Tape& tape) const {
    tape.inputs.clear();
    tape.pre.clear();
    Matrix<Scalar> h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      tape.inputs.push_back(h);
      Matrix<Scalar> z = layers_[l].weight * h;
      z.colwise() += layers_[l].bias;
      tape.pre.push_back(z);
      h = (l + 1 < layers_.size()) ? Matrix<Scalar>(z.cwiseMax(Scalar(0))) : z;
    }
    return h;
  }

  // Gradient of a scalar loss given dLoss/dOutput for the taped forward pass.
  Gradients<Scalar> backward(const Tape& tape, const Matrix<Scalar>& grad_out) const {
    Gradients<Scalar> g;
    g.weight.resize(layers_.size());
    g.bias.resize(layers_.size());
    Matrix<Scalar> delta = grad_out;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      if (l + 1 < layers_.size()) {
        delta = delta.cwiseProduct((tape.pre[l].array() > Scalar(0)).template cast<Scalar>().matrix());
      }
      g.weight[l] = delta * tape.inputs[l].transpose();
      g.bias[l] = delta.rowwise().sum();
      if (l > 0) delta = layers_[l].weight.transpose() * delta;
    }
    return g;
  }

  // target <- tau * source + (1 - tau) * target
  void soft_update_from(const Mlp& source, Scalar tau) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      layers_[l].weight = tau * source.layers_[l].weight + (Scalar(1) - tau) * layers_[l].weight;
      layers_[l].bias = tau * source.layers_[l].bias + (Scalar(1) - tau) * layers_[l].bias;
    }
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
  }

  std::vector<Scalar> flatten() const {
    std::vector<Scalar> out;
    out.reserve(parameter_count());
    for (const auto& l : layers_) {
      out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
      out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
    }
    return out;
  }

  void unflatten(std::span<const Scalar> params) {
    if (params.size() != parameter_count()) throw Error(ErrorKind::InvalidArgument, "parameter count mismatch");
    std::size_t at = 0;
    for (auto& l : layers_) {
      std::copy_n(params.data() + at, l.weight.size(), l.weight.data());
      at += static_cast<std::size_t>(l.weight.size());
      std::copy_n(params.data() + at, l.bias.size(), l.bias.data());
      at += static_cast<std::size_t>(l.bias.size());
    }
  }

  bool operator==(const Mlp& other) const { return sizes_ == other.sizes_ && flatten() == other.flatten(); }

 private:
  std::vector<int> sizes_;
  std::vector<Layer<Scalar>> layers_;
};

template <typename Scalar>
class Adam {
 public:
  explicit Adam(Scalar lr, Scalar beta1 = Scalar(0.9), Scalar beta2 = Scalar(0.999), Scalar eps = Scalar(1e-8))
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(Mlp<Scalar>& net, const Gradients<Scalar>& g) {
    auto& layers = net.layers();
    if (m_w_.empty()) {
      for (const auto& l : layers) {
        m_w_.push_back(Matrix<Scalar>::Zero(l.weight.rows(), l.weight.cols()));
        v_w_.push_back(Matrix<Scalar>::Zero(l.weight.rows(), l.weight.cols()));
        m_b_.push_back(Vector<Scalar>::Zero(l.bias.size()));
        v_b_.push_back(Vector<Scalar>::Zero(l.bias.size()));
      }
    }
    ++t_;
    const Scalar c1 = Scalar(1) - static_cast<Scalar>(std::pow(beta1_, t_));
    const Scalar c2 = Scalar(1) - static_cast<Scalar>(std::pow(beta2_, t_));
    for (std::size_t l = 0; l < layers.size(); ++l) {
      update(layers[l].weight, g.weight[l], m_w_[l], v_w_[l], c1, c2);
      update(layers[l].bias, g.bias[l], m_b_[l], v_b_[l], c1, c2);
    }
  }

  std::int64_t steps() const noexcept { return t_; }

 private:
  template <typename P, typename G, typename M>
  void update(P& param, const G& grad, M& m, M& v, Scalar c1, Scalar c2) {
    m = beta1_ * m + (Scalar(1) - beta1_) * grad;
    v = beta2_ * v + (Scalar(1) - beta2_) * grad.cwiseProduct(grad);
    param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }

  Scalar lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<Matrix<Scalar>> m_w_, v_w_;
  std::vector<Vector<Scalar>> m_b_, v_b_;
};

}  // namespace osct::nn
