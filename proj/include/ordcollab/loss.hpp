#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ordcollab/corpus.hpp"
#include "ordcollab/labels.hpp"

namespace ordcollab {

enum class LossKind { CE, OCE };

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view text);

/// Probabilities are clipped to [kProbabilityClip, 1] before the log.
inline constexpr double kProbabilityClip = 1e-7;

/// -sum_i y_i log p_i
double ce_loss(std::span<const double> p, std::span<const double> y);

/// |argmax(y) - argmax(p)|, ties to the lowest index.
std::size_t ordinal_distance(std::span<const double> p, std::span<const double> y);

/// (1 + |argmax(y) - argmax(p)|) * ce_loss(p, y)
double oce_loss(std::span<const double> p, std::span<const double> y);

double loss(LossKind kind, std::span<const double> p, std::span<const double> y);

/// N / (C * n_c) per class, n_c counted by argmax label. Throws DataError
/// if a class is absent.
std::array<double, kNumClasses> class_balance_weights(const Dataset& train);

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Weighted mean loss over a batch of probability rows `p` against label
/// rows `y`, with optional per-row weights (empty = all ones). When `dlogits`
/// is non-null it receives d(mean loss)/d(softmax logits).
template <typename Scalar>
double batch_loss(LossKind kind, const RowMatrix<Scalar>& p, const RowMatrix<Scalar>& y,
                  std::span<const double> weights, RowMatrix<Scalar>* dlogits);

extern template double batch_loss<float>(LossKind, const RowMatrix<float>&,
                                         const RowMatrix<float>&, std::span<const double>,
                                         RowMatrix<float>*);
extern template double batch_loss<double>(LossKind, const RowMatrix<double>&,
                                          const RowMatrix<double>&, std::span<const double>,
                                          RowMatrix<double>*);

}  // namespace ordcollab
