#pragma once

#include "bdcopy/core.hpp"
#include "bdcopy/random.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace bdcopy {

/// Fully connected regressor: rectifier hidden layers, identity output.
///
/// All weights and biases live in one flat parameter vector so optimizers and
/// gradient checks can treat the network as a point in R^p. Layer l occupies
/// a column-major (out x in) weight block followed by its bias.
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Points = Eigen::Ref<const PointMatrixX<Scalar>>;

  Mlp() = default;

  /// `widths` lists every layer's output size and must end in 1. A single
  /// entry {1} is a linear model.
  Mlp(Index input_dim, std::vector<Index> widths) : input_dim_(input_dim), widths_(std::move(widths)) {
    if (input_dim_ < 1) throw InvalidArgument("mlp: input dimension must be >= 1");
    if (widths_.empty() || widths_.back() != 1) throw InvalidArgument("mlp: widths must end in 1");
    Index fan_in = input_dim_;
    for (Index w : widths_) {
      if (w < 1) throw InvalidArgument("mlp: every width must be >= 1");
      offsets_.push_back(count_);
      count_ += w * fan_in + w;
      fan_in = w;
    }
    params_ = Vector::Zero(count_);
  }

  /// Weights uniform in +-sqrt(6 / fan_in), biases zero.
  static Mlp he_uniform(Index input_dim, std::vector<Index> widths, std::uint64_t seed) {
    Mlp net(input_dim, std::move(widths));
    Rng rng(seed, 0x1417);
    for (std::size_t l = 0; l < net.widths_.size(); ++l) {
      const Index fan_in = net.fan_in(l);
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
      auto w = net.weight(l);
      for (Index c = 0; c < w.cols(); ++c) {
        for (Index r = 0; r < w.rows(); ++r) w(r, c) = static_cast<Scalar>(rng.uniform(-limit, limit));
      }
    }
    return net;
  }

  Index input_dim() const { return input_dim_; }
  const std::vector<Index>& widths() const { return widths_; }
  std::size_t layer_count() const { return widths_.size(); }
  Index parameter_count() const { return count_; }

  const Vector& parameters() const { return params_; }
  Vector& parameters() { return params_; }
  void set_parameters(const Vector& p) {
    if (p.size() != count_) throw InvalidArgument("mlp: parameter count mismatch");
    params_ = p;
  }

  Eigen::Map<Matrix> weight(std::size_t l) {
    return {params_.data() + offsets_[l], widths_[l], fan_in(l)};
  }
  Eigen::Map<const Matrix> weight(std::size_t l) const {
    return {params_.data() + offsets_[l], widths_[l], fan_in(l)};
  }
  Eigen::Map<Vector> bias(std::size_t l) {
    return {params_.data() + offsets_[l] + widths_[l] * fan_in(l), widths_[l]};
  }
  Eigen::Map<const Vector> bias(std::size_t l) const {
    return {params_.data() + offsets_[l] + widths_[l] * fan_in(l), widths_[l]};
  }

  /// One output per row of `x`.
  Vector predict(const Points& x) const {
    require_dim(x.cols(), input_dim_, "mlp predict");
    Matrix a = x.transpose();
    for (std::size_t l = 0; l < widths_.size(); ++l) {
      Matrix z = (weight(l) * a).colwise() + bias(l);
      a = l + 1 < widths_.size() ? Matrix(z.cwiseMax(Scalar(0))) : std::move(z);
    }
    return a.row(0).transpose();
  }

  /// Mean squared error over the rows of `x` and its gradient with respect
  /// to parameters(), written into `grad` (resized as needed).
  Scalar loss_and_gradient(const Points& x, const Eigen::Ref<const Vector>& y, Vector& grad) const {
    require_dim(x.cols(), input_dim_, "mlp gradient");
    const Index n = x.rows();
    if (y.size() != n) throw InvalidArgument("mlp gradient: target count mismatch");
    const std::size_t layers = widths_.size();

    // activations[0] is the input; pre[l] is layer l's pre-activation.
    std::vector<Matrix> activations(layers + 1);
    std::vector<Matrix> pre(layers);
    activations[0] = x.transpose();
    for (std::size_t l = 0; l < layers; ++l) {
      pre[l] = (weight(l) * activations[l]).colwise() + bias(l);
      activations[l + 1] = l + 1 < layers ? Matrix(pre[l].cwiseMax(Scalar(0))) : pre[l];
    }
    const auto residual = (activations[layers].row(0).transpose() - y).eval();
    const Scalar loss = residual.squaredNorm() / static_cast<Scalar>(n);

    grad.resize(count_);
    Matrix delta = (Scalar(2) / static_cast<Scalar>(n)) * residual.transpose();
    for (std::size_t l = layers; l-- > 0;) {
      const Index off = offsets_[l];
      const Index rows = widths_[l];
      const Index cols = fan_in(l);
      Eigen::Map<Matrix>(grad.data() + off, rows, cols).noalias() = delta * activations[l].transpose();
      Eigen::Map<Vector>(grad.data() + off + rows * cols, rows) = delta.rowwise().sum();
      if (l > 0) {
        Matrix back = weight(l).transpose() * delta;
        delta = back.cwiseProduct((pre[l - 1].array() > Scalar(0)).matrix().template cast<Scalar>());
      }
    }
    return loss;
  }

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.input_dim_ == b.input_dim_ && a.widths_ == b.widths_ && a.params_ == b.params_;
  }

 private:
  Index fan_in(std::size_t l) const { return l == 0 ? input_dim_ : widths_[l - 1]; }

  Index input_dim_ = 0;
  std::vector<Index> widths_;
  std::vector<Index> offsets_;
  Index count_ = 0;
  Vector params_;
};

/// First and second moment estimates for the Adam update rule.
template <typename Scalar>
class Adam {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Adam(Index size, Scalar learning_rate, Scalar beta1 = Scalar(0.9), Scalar beta2 = Scalar(0.999),
       Scalar epsilon = Scalar(1e-8))
      : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon),
        m_(Vector::Zero(size)), v_(Vector::Zero(size)) {}

  void step(Vector& params, const Vector& grad) {
    ++t_;
    m_ = beta1_ * m_ + (Scalar(1) - beta1_) * grad;
    v_ = beta2_ * v_ + (Scalar(1) - beta2_) * grad.cwiseAbs2();
    const Scalar c1 = Scalar(1) - std::pow(beta1_, static_cast<Scalar>(t_));
    const Scalar c2 = Scalar(1) - std::pow(beta2_, static_cast<Scalar>(t_));
    params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
  }

 private:
  Scalar lr_, beta1_, beta2_, eps_;
  Vector m_, v_;
  long long t_ = 0;
};

}  // namespace bdcopy
