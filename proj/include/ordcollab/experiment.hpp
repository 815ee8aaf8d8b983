#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "ordcollab/augment.hpp"
#include "ordcollab/corpus.hpp"
#include "ordcollab/metrics.hpp"
#include "ordcollab/mlp.hpp"
#include "ordcollab/splits.hpp"
#include "ordcollab/trainer.hpp"

namespace ordcollab {

enum class ModelKind {
  Mlp,
  Majority,  // predicts the most frequent training class
};

/// One experiment = one dataset construction + one training recipe,
/// evaluated with leave-one-group-out folds.
struct ExperimentConfig {
  std::string corpus;
  Modality modality = Modality::AudioVideo;
  Mapping mapping = Mapping::B2toA;
  FeatureKind features = FeatureKind::B2;
  ModelKind model = ModelKind::Mlp;
  TrainConfig train;  // carries loss and class_balancing
  std::optional<MixupConfig> mixup;
  MlpShape network;  // input_dim is derived from `features`
  std::optional<std::set<std::string>> pinned_groups;  // nullopt = automatic
  std::uint64_t seed = 0;
  std::string output_dir;

  void validate() const;
};

/// Parses a config document; unknown keys are rejected with ConfigError.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
/// Full config document. `for_echo` drops run-location fields (output_dir)
/// so reports depend only on what determines the results.
nlohmann::json to_json(const ExperimentConfig& cfg, bool for_echo = false);

struct FoldResult {
  std::string held_out_group;
  std::size_t n_train = 0;
  std::size_t n_train_used = 0;  // after augmentation
  std::size_t n_test = 0;
  WeightedMetrics metrics;
  double accuracy = 0.0;
  ConfusionCounts confusion{};
  std::size_t best_epoch = 0;
  double best_test_loss = 0.0;
  double final_learning_rate = 0.0;
};

struct EvalReport {
  nlohmann::json config;  // echo
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::string> pinned_groups;
  std::size_t dataset_size = 0;
  std::array<std::size_t, kNumClasses> class_counts{};
  std::vector<FoldResult> folds;
  MeanStd precision, recall, f1;
  AggregateConfusion confusion;
};

struct RunOptions {
  std::size_t jobs = 1;  // folds evaluated concurrently
};

/// Builds the dataset from `cfg.corpus` and runs every fold.
EvalReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});
/// Runs every fold on an already-built dataset.
EvalReport run_experiment(const Dataset& dataset, const ExperimentConfig& cfg,
                          const RunOptions& options = {});

Dataset load_experiment_dataset(const ExperimentConfig& cfg);
std::set<std::string> resolve_pinned_groups(const Dataset& dataset, const ExperimentConfig& cfg);

/// Result of training one fold, kept for snapshotting.
struct FoldModel {
  FoldResult result;
  Mlp<float> model;
  std::vector<EpochRecord> history;
};

/// Trains and scores a single fold. `fold_index` selects the RNG streams.
FoldModel run_fold(const Dataset& dataset, const FoldSpec& fold, std::size_t fold_index,
                   const ExperimentConfig& cfg);

nlohmann::json to_json(const EvalReport& report);
/// fold,held_out_group,n_test,precision,recall,f1
std::string metrics_csv(const EvalReport& report);
/// Row-normalized aggregate confusion matrix, two decimals.
std::string render_confusion(const nlohmann::json& report);
/// Summary table plus confusion matrix for a report document.
std::string render_report(const nlohmann::json& report);

/// Writes report.json, metrics.csv and confusion.txt into `dir`.
void write_report(const std::filesystem::path& dir, const EvalReport& report);

std::string version_string();

}  // namespace ordcollab
