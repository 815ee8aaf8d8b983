#include "ordcollab/mlp.hpp"

#include <cmath>
#include <string>

#include "ordcollab/error.hpp"

namespace ordcollab {

void MlpShape::validate() const {
  if (input_dim == 0) throw ConfigError("model input_dim must be >= 1");
  if (hidden_width == 0) throw ConfigError("model hidden_width must be >= 1");
  if (dropout.size() != hidden_layers + 1)
    throw ConfigError("model needs " + std::to_string(hidden_layers + 1) +
                      " dropout rates (input + one per hidden layer)");
  for (double r : dropout)
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("dropout rates must lie in [0, 1)");
}

std::vector<std::size_t> MlpShape::layer_dims() const {
  std::vector<std::size_t> dims{input_dim};
  for (std::size_t i = 0; i < hidden_layers; ++i) dims.push_back(hidden_width);
  dims.push_back(kNumClasses);
  return dims;
}

std::size_t parameter_count(const MlpShape& shape) {
  const auto dims = shape.layer_dims();
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) n += dims[i] * dims[i + 1] + dims[i + 1];
  return n;
}

template <typename Scalar>
Mlp<Scalar>::Mlp(MlpShape shape) : shape_(std::move(shape)) {
  shape_.validate();
  const auto dims = shape_.layer_dims();
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const auto in = static_cast<Eigen::Index>(dims[i]);
    const auto out = static_cast<Eigen::Index>(dims[i + 1]);
    layers_.push_back(Layer{Matrix::Zero(in, out), RowVector::Zero(out)});
  }
}

template <typename Scalar>
Mlp<Scalar> Mlp<Scalar>::glorot(MlpShape shape, Rng& rng) {
  Mlp model(std::move(shape));
  for (auto& layer : model.layers_) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.weights.rows() + layer.weights.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
        layer.weights(r, c) = static_cast<Scalar>(dist(rng));
  }
  return model;
}

template <typename Scalar>
std::size_t Mlp<Scalar>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return n;
}

namespace {

template <typename Matrix>
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  using Scalar = typename Matrix::Scalar;
  const double keep = 1.0 - rate;
  const auto scale = static_cast<Scalar>(1.0 / keep);
  Matrix mask(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      mask(r, c) = uniform01(rng) < keep ? scale : Scalar(0);
  return mask;
}

}  // namespace

template <typename Scalar>
typename Mlp<Scalar>::Pass Mlp<Scalar>::forward(const Matrix& x, Rng* dropout_rng) const {
  if (x.cols() != static_cast<Eigen::Index>(shape_.input_dim))
    throw DataError("forward: expected " + std::to_string(shape_.input_dim) +
                    " features, got " + std::to_string(x.cols()));
  Pass pass;
  const auto hidden = layers_.size() - 1;
  pass.inputs.reserve(layers_.size());
  pass.hidden_pre.reserve(hidden);

  auto apply_dropout = [&](Matrix a, std::size_t position) {
    if (dropout_rng && shape_.dropout[position] > 0.0) {
      pass.masks.push_back(
          dropout_mask<Matrix>(a.rows(), a.cols(), shape_.dropout[position], *dropout_rng));
      a.array() *= pass.masks.back().array();
    } else if (dropout_rng) {
      pass.masks.push_back(Matrix::Ones(a.rows(), a.cols()));
    }
    return a;
  };

  pass.inputs.push_back(apply_dropout(x, 0));
  for (std::size_t l = 0; l < hidden; ++l) {
    Matrix z = pass.inputs.back() * layers_[l].weights;
    z.rowwise() += layers_[l].bias;
    pass.hidden_pre.push_back(z);
    Matrix a = z.cwiseMax(Scalar(0));
    pass.inputs.push_back(apply_dropout(std::move(a), l + 1));
  }
  Matrix logits = pass.inputs.back() * layers_.back().weights;
  logits.rowwise() += layers_.back().bias;
  softmax_rows(logits);
  pass.probabilities = std::move(logits);
  return pass;
}

template <typename Scalar>
typename Mlp<Scalar>::Matrix Mlp<Scalar>::predict(const Matrix& x) const {
  if (x.cols() != static_cast<Eigen::Index>(shape_.input_dim))
    throw DataError("predict: expected " + std::to_string(shape_.input_dim) +
                    " features, got " + std::to_string(x.cols()));
  Matrix a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = a * layers_[l].weights;
    z.rowwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) a = z.cwiseMax(Scalar(0));
    else a = std::move(z);
  }
  softmax_rows(a);
  return a;
}

template <typename Scalar>
std::vector<Scalar> Mlp<Scalar>::forward(std::span<const Scalar> x, Rng* dropout_rng) const {
  Matrix row(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) row(0, static_cast<Eigen::Index>(i)) = x[i];
  Matrix p = dropout_rng ? forward(row, dropout_rng).probabilities : predict(row);
  return {p.data(), p.data() + p.size()};
}

template <typename Scalar>
std::vector<typename Mlp<Scalar>::Layer> Mlp<Scalar>::backward(const Pass& pass,
                                                               const Matrix& dlogits) const {
  std::vector<Layer> grads(layers_.size());
  Matrix delta = dlogits;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    grads[l].weights.noalias() = pass.inputs[l].transpose() * delta;
    grads[l].bias = delta.colwise().sum();
    if (l == 0) break;
    Matrix upstream = delta * layers_[l].weights.transpose();
    if (!pass.masks.empty()) upstream.array() *= pass.masks[l].array();
    upstream.array() *= (pass.hidden_pre[l - 1].array() > Scalar(0)).template cast<Scalar>();
    delta = std::move(upstream);
  }
  return grads;
}

template class Mlp<float>;
template class Mlp<double>;

}  // namespace ordcollab
