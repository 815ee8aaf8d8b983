#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ordcollab/labels.hpp"

namespace ordcollab {

using ConfusionCounts = std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;

/// Rows are true classes, columns predicted classes.
ConfusionCounts confusion_counts(std::span<const std::size_t> predictions,
                                 std::span<const std::size_t> truths);

struct PerClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  bool precision_undefined = false;  // no predictions of this class
  bool recall_undefined = false;     // no true samples of this class
};

struct WeightedMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::array<PerClassMetrics, kNumClasses> per_class{};
};

/// Support-weighted precision/recall/F1 over the five classes. Per-class
/// values with a zero denominator count as 0 and are flagged.
WeightedMetrics weighted_metrics(std::span<const std::size_t> predictions,
                                 std::span<const std::size_t> truths);
WeightedMetrics weighted_metrics(const ConfusionCounts& counts);

struct AggregateConfusion {
  ConfusionCounts counts{};  // summed raw counts
  std::array<std::array<double, kNumClasses>, kNumClasses> percent{};  // row-normalized
  std::array<bool, kNumClasses> zero_support{};

  /// Sum of the diagonal percentages.
  double diagonal_mass() const;
};

AggregateConfusion aggregate_confusion(std::span<const ConfusionCounts> per_fold);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

MeanStd mean_std(std::span<const double> values);

}  // namespace ordcollab
