#pragma once

#include <cstddef>
#include <vector>

#include "ordcollab/corpus.hpp"
#include "ordcollab/loss.hpp"
#include "ordcollab/mlp.hpp"
#include "ordcollab/rng.hpp"

namespace ordcollab {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Reduce-on-plateau rule applied to the per-epoch test loss.
struct PlateauConfig {
  std::size_t patience = 20;
  double factor = 0.5;
  double min_lr = 1e-5;
  double min_delta = 1e-4;
};

struct TrainConfig {
  std::size_t epochs = 500;
  double batch_fraction = 0.1;
  LossKind loss = LossKind::OCE;
  bool class_balancing = false;
  AdamConfig adam;
  PlateauConfig plateau;

  void validate() const;
  /// ceil(batch_fraction * n), at least 1.
  std::size_t batch_size(std::size_t n) const;
};

/// Tracks the best loss seen and scales the learning rate by `factor`
/// after `patience` epochs without an improvement larger than `min_delta`.
class PlateauScheduler {
 public:
  PlateauScheduler(PlateauConfig cfg, double initial_lr);

  /// Feeds one epoch's monitored loss; returns the learning rate for the next epoch.
  double step(double loss);
  double learning_rate() const { return lr_; }

 private:
  PlateauConfig cfg_;
  double lr_;
  double best_;
  std::size_t wait_ = 0;
};

struct EpochRecord {
  double train_loss = 0.0;
  double test_loss = 0.0;
  double learning_rate = 0.0;
};

template <typename Scalar>
struct TrainedModel {
  Mlp<Scalar> best;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 0-based index into history
  double best_test_loss = 0.0;
};

/// Mini-batch Adam over `train`; after every epoch the model is scored on
/// `test` in inference mode and the lowest-test-loss weights are kept.
template <typename Scalar>
TrainedModel<Scalar> train(Mlp<Scalar> model, const Dataset& train_set, const Dataset& test_set,
                           const TrainConfig& cfg, Rng& rng);

/// Mean unweighted loss of `model` over `data` in inference mode.
template <typename Scalar>
double evaluate_loss(const Mlp<Scalar>& model, const Dataset& data, LossKind kind);

/// Argmax class of each sample in inference mode.
template <typename Scalar>
std::vector<std::size_t> predict_labels(const Mlp<Scalar>& model, const Dataset& data);

template <typename Scalar>
RowMatrix<Scalar> feature_matrix(const Dataset& data);
template <typename Scalar>
RowMatrix<Scalar> label_matrix(const Dataset& data);

extern template TrainedModel<float> train<float>(Mlp<float>, const Dataset&, const Dataset&,
                                                 const TrainConfig&, Rng&);
extern template TrainedModel<double> train<double>(Mlp<double>, const Dataset&, const Dataset&,
                                                   const TrainConfig&, Rng&);

}  // namespace ordcollab
