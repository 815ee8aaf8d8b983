#include "ordcollab/loss.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "ordcollab/error.hpp"

namespace ordcollab {

std::string_view to_string(LossKind kind) { return kind == LossKind::CE ? "CE" : "OCE"; }

LossKind parse_loss_kind(std::string_view text) {
  if (text == "CE") return LossKind::CE;
  if (text == "OCE") return LossKind::OCE;
  throw ConfigError("unknown loss '" + std::string(text) + "' (expected CE or OCE)");
}

double ce_loss(std::span<const double> p, std::span<const double> y) {
  if (p.size() != y.size()) throw DataError("ce_loss: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (y[i] == 0.0) continue;
    total -= y[i] * std::log(std::clamp(p[i], kProbabilityClip, 1.0));
  }
  return total;
}

std::size_t ordinal_distance(std::span<const double> p, std::span<const double> y) {
  const auto a = static_cast<long>(argmax(y));
  const auto b = static_cast<long>(argmax(p));
  return static_cast<std::size_t>(std::labs(a - b));
}

double oce_loss(std::span<const double> p, std::span<const double> y) {
  return (1.0 + static_cast<double>(ordinal_distance(p, y))) * ce_loss(p, y);
}

double loss(LossKind kind, std::span<const double> p, std::span<const double> y) {
  return kind == LossKind::CE ? ce_loss(p, y) : oce_loss(p, y);
}

std::array<double, kNumClasses> class_balance_weights(const Dataset& train) {
  const auto counts = train.class_counts();
  const auto& scheme = OrdinalLabelScheme::standard();
  std::array<double, kNumClasses> weights{};
  const double total = static_cast<double>(train.size());
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (counts[c] == 0)
      throw DataError("class_balance_weights: class '" + scheme.name(c) +
                      "' has no training samples");
    weights[c] = total / (static_cast<double>(kNumClasses) * static_cast<double>(counts[c]));
  }
  return weights;
}

template <typename Scalar>
double batch_loss(LossKind kind, const RowMatrix<Scalar>& p, const RowMatrix<Scalar>& y,
                  std::span<const double> weights, RowMatrix<Scalar>* dlogits) {
  const auto rows = p.rows();
  const auto cols = p.cols();
  if (y.rows() != rows || y.cols() != cols) throw DataError("batch_loss: shape mismatch");
  if (!weights.empty() && static_cast<Eigen::Index>(weights.size()) != rows)
    throw DataError("batch_loss: weight count mismatch");
  if (dlogits) dlogits->resize(rows, cols);
  const double inv_rows = rows ? 1.0 / static_cast<double>(rows) : 0.0;

  double total = 0.0;
  double prob[kNumClasses];
  double label[kNumClasses];
  double dp[kNumClasses];
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      prob[c] = static_cast<double>(p(r, c));
      label[c] = static_cast<double>(y(r, c));
    }
    std::span<const double> ps(prob, static_cast<std::size_t>(cols));
    std::span<const double> ys(label, static_cast<std::size_t>(cols));
    const double scale = (kind == LossKind::OCE ? 1.0 + static_cast<double>(ordinal_distance(ps, ys)) : 1.0) *
                         (weights.empty() ? 1.0 : weights[static_cast<std::size_t>(r)]);
    total += scale * ce_loss(ps, ys);
    if (!dlogits) continue;
    // dL/dp is zero where the clip is active; chain through the softmax Jacobian.
    double dot = 0.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      dp[c] = prob[c] >= kProbabilityClip && label[c] != 0.0 ? -label[c] / prob[c] : 0.0;
      dot += dp[c] * prob[c];
    }
    for (Eigen::Index c = 0; c < cols; ++c)
      (*dlogits)(r, c) = static_cast<Scalar>(scale * inv_rows * prob[c] * (dp[c] - dot));
  }
  return total * inv_rows;
}

template double batch_loss<float>(LossKind, const RowMatrix<float>&, const RowMatrix<float>&,
                                  std::span<const double>, RowMatrix<float>*);
template double batch_loss<double>(LossKind, const RowMatrix<double>&, const RowMatrix<double>&,
                                   std::span<const double>, RowMatrix<double>*);

}  // namespace ordcollab
