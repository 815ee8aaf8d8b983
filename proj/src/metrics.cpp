#include "ordcollab/metrics.hpp"

#include <cmath>
#include <string>

#include "ordcollab/error.hpp"

namespace ordcollab {

ConfusionCounts confusion_counts(std::span<const std::size_t> predictions,
                                 std::span<const std::size_t> truths) {
  if (predictions.size() != truths.size())
    throw DataError("prediction/truth length mismatch (" + std::to_string(predictions.size()) +
                    " vs " + std::to_string(truths.size()) + ")");
  ConfusionCounts counts{};
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] >= kNumClasses || predictions[i] >= kNumClasses)
      throw DataError("label index out of range");
    ++counts[truths[i]][predictions[i]];
  }
  return counts;
}

WeightedMetrics weighted_metrics(std::span<const std::size_t> predictions,
                                 std::span<const std::size_t> truths) {
  if (truths.empty()) throw DataError("weighted_metrics: empty input");
  return weighted_metrics(confusion_counts(predictions, truths));
}

WeightedMetrics weighted_metrics(const ConfusionCounts& counts) {
  WeightedMetrics out;
  std::size_t total = 0;
  for (const auto& row : counts)
    for (auto v : row) total += v;
  if (total == 0) throw DataError("weighted_metrics: empty confusion matrix");

  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& m = out.per_class[c];
    const double tp = static_cast<double>(counts[c][c]);
    std::size_t predicted = 0;
    for (std::size_t r = 0; r < kNumClasses; ++r) predicted += counts[r][c];
    for (auto v : counts[c]) m.support += v;
    m.precision_undefined = predicted == 0;
    m.recall_undefined = m.support == 0;
    m.precision = m.precision_undefined ? 0.0 : tp / static_cast<double>(predicted);
    m.recall = m.recall_undefined ? 0.0 : tp / static_cast<double>(m.support);
    const double denom = m.precision + m.recall;
    m.f1 = denom > 0.0 ? 2.0 * m.precision * m.recall / denom : 0.0;
    const double weight = static_cast<double>(m.support) / static_cast<double>(total);
    out.precision += weight * m.precision;
    out.recall += weight * m.recall;
    out.f1 += weight * m.f1;
  }
  return out;
}

double AggregateConfusion::diagonal_mass() const {
  double sum = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) sum += percent[c][c];
  return sum;
}

AggregateConfusion aggregate_confusion(std::span<const ConfusionCounts> per_fold) {
  AggregateConfusion out;
  for (const auto& fold : per_fold)
    for (std::size_t r = 0; r < kNumClasses; ++r)
      for (std::size_t c = 0; c < kNumClasses; ++c) out.counts[r][c] += fold[r][c];
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    std::size_t support = 0;
    for (auto v : out.counts[r]) support += v;
    out.zero_support[r] = support == 0;
    if (support == 0) continue;
    for (std::size_t c = 0; c < kNumClasses; ++c)
      out.percent[r][c] = 100.0 * static_cast<double>(out.counts[r][c]) / static_cast<double>(support);
  }
  return out;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / static_cast<double>(values.size()));
  return out;
}

}  // namespace ordcollab
