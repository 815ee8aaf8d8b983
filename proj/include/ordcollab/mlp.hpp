#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ordcollab/labels.hpp"
#include "ordcollab/rng.hpp"

namespace ordcollab {

/// Layer layout of the dense classifier: input -> hidden x N (ReLU) -> 5
/// (softmax). `dropout[0]` applies to the input, `dropout[i]` to the output
/// of hidden layer i.
struct MlpShape {
  std::size_t input_dim = kB2Codes;
  std::size_t hidden_width = 500;
  std::size_t hidden_layers = 3;
  std::vector<double> dropout{0.1, 0.2, 0.2, 0.3};

  void validate() const;
  std::vector<std::size_t> layer_dims() const;
};

/// Trainable weights plus biases of a model with this shape.
std::size_t parameter_count(const MlpShape& shape);

template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  struct Layer {
    Matrix weights;  // fan_in x fan_out
    RowVector bias;  // fan_out
  };

  /// Activations kept for backprop. `inputs[l]` is what dense layer l saw
  /// (after dropout); `masks` is empty in inference mode.
  struct Pass {
    std::vector<Matrix> inputs;
    std::vector<Matrix> masks;
    std::vector<Matrix> hidden_pre;
    Matrix probabilities;
  };

  Mlp() = default;
  /// All weights and biases zero.
  explicit Mlp(MlpShape shape);
  /// Glorot-uniform weights, zero biases.
  static Mlp glorot(MlpShape shape, Rng& rng);

  const MlpShape& shape() const { return shape_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t parameter_count() const;

  /// Batch forward pass, one sample per row. A non-null `dropout_rng`
  /// selects training mode (inverted dropout); null means inference.
  Pass forward(const Matrix& x, Rng* dropout_rng) const;
  Matrix predict(const Matrix& x) const;
  std::vector<Scalar> forward(std::span<const Scalar> x, Rng* dropout_rng) const;

  /// Parameter gradients given d(loss)/d(logits) for every row of the pass.
  std::vector<Layer> backward(const Pass& pass, const Matrix& dlogits) const;

 private:
  MlpShape shape_;
  std::vector<Layer> layers_;
};

extern template class Mlp<float>;
extern template class Mlp<double>;

/// Row-wise softmax with max subtraction.
template <typename Derived>
void softmax_rows(Eigen::MatrixBase<Derived>& z) {
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

}  // namespace ordcollab
