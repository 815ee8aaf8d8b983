#include "ordcollab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "ordcollab/error.hpp"
#include "ordcollab/version.hpp"

namespace ordcollab {

namespace {

// Stream tags; one independent RNG stream per (fold, purpose).
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kMixupStream = 2;
constexpr std::uint64_t kTrainStream = 3;

std::vector<std::size_t> truth_labels(const Dataset& data) {
  std::vector<std::size_t> out;
  out.reserve(data.size());
  for (const auto& s : data.samples) out.push_back(s.label_index());
  return out;
}

std::size_t majority_class(const Dataset& data) {
  const auto counts = data.class_counts();
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

std::string version_string() {
  return "ordcollab " + std::string(version()) + " (" + std::string(git_describe()) + ")";
}

void ExperimentConfig::validate() const {
  if (corpus.empty()) throw ConfigError("config: corpus path is required");
  train.validate();
  if (mixup) mixup->validate();
  MlpShape shape = network;
  shape.input_dim = feature_dimension(features);
  shape.validate();
  if (model == ModelKind::Majority && mixup)
    throw ConfigError("config: the majority baseline does not use mixup");
}

Dataset load_experiment_dataset(const ExperimentConfig& cfg) {
  auto tasks = select_modality(parse_corpus(cfg.corpus), cfg.modality);
  if (tasks.empty())
    throw DataError("corpus " + cfg.corpus + " has no tasks for modality " +
                    std::string(to_string(cfg.modality)));
  return build_dataset(tasks, cfg.features, cfg.mapping);
}

std::set<std::string> resolve_pinned_groups(const Dataset& dataset, const ExperimentConfig& cfg) {
  return cfg.pinned_groups ? *cfg.pinned_groups : auto_pinned_groups(dataset);
}

FoldModel run_fold(const Dataset& dataset, const FoldSpec& fold, std::size_t fold_index,
                   const ExperimentConfig& cfg) {
  const Dataset train_set = dataset.subset(fold.train_ids);
  const Dataset test_set = dataset.subset(fold.test_ids);
  FoldModel out;
  auto& r = out.result;
  r.held_out_group = fold.held_out_group;
  r.n_train = train_set.size();
  r.n_test = test_set.size();

  std::vector<std::size_t> predictions;
  if (cfg.model == ModelKind::Majority) {
    assert_no_leakage(fold, train_set);
    r.n_train_used = train_set.size();
    predictions.assign(test_set.size(), majority_class(train_set));
  } else {
    Dataset augmented;
    const Dataset* fit_set = &train_set;
    if (cfg.mixup) {
      auto rng = make_stream(cfg.seed, {fold_index, kMixupStream});
      augmented = controlled_mixup(train_set, *cfg.mixup, rng);
      fit_set = &augmented;
    }
    assert_no_leakage(fold, *fit_set);
    r.n_train_used = fit_set->size();

    MlpShape shape = cfg.network;
    shape.input_dim = dataset.dimension();
    auto init_rng = make_stream(cfg.seed, {fold_index, kInitStream});
    auto model = Mlp<float>::glorot(shape, init_rng);
    auto train_rng = make_stream(cfg.seed, {fold_index, kTrainStream});
    auto trained = train<float>(std::move(model), *fit_set, test_set, cfg.train, train_rng);
    r.best_epoch = trained.best_epoch;
    r.best_test_loss = trained.best_test_loss;
    r.final_learning_rate = trained.history.back().learning_rate;
    predictions = predict_labels(trained.best, test_set);
    out.model = std::move(trained.best);
    out.history = std::move(trained.history);
  }

  const auto truths = truth_labels(test_set);
  r.metrics = weighted_metrics(predictions, truths);
  r.confusion = confusion_counts(predictions, truths);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) correct += predictions[i] == truths[i];
  r.accuracy = static_cast<double>(correct) / static_cast<double>(truths.size());
  return out;
}

EvalReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  return run_experiment(load_experiment_dataset(cfg), cfg, options);
}

EvalReport run_experiment(const Dataset& dataset, const ExperimentConfig& cfg,
                          const RunOptions& options) {
  const auto pinned = resolve_pinned_groups(dataset, cfg);
  const auto folds = logo_splits(dataset, pinned);

  std::vector<FoldResult> results(folds.size());
  std::vector<std::exception_ptr> errors(folds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < folds.size(); i = next++) {
      try {
        results[i] = run_fold(dataset, folds[i], i, cfg).result;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, folds.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < folds.size(); ++i) {
    if (!errors[i]) continue;
    const auto where = "fold " + std::to_string(i + 1) + " (held-out group '" +
                       folds[i].held_out_group + "'): ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    } catch (const TrainingError& e) {
      throw TrainingError(where + e.what());
    } catch (const std::exception& e) {
      throw DataError(where + e.what());
    }
  }

  EvalReport report;
  report.config = to_json(cfg, true);
  report.seed = cfg.seed;
  report.version = version_string();
  report.pinned_groups.assign(pinned.begin(), pinned.end());
  report.dataset_size = dataset.size();
  report.class_counts = dataset.class_counts();
  report.folds = std::move(results);
  std::vector<double> p, r, f;
  std::vector<ConfusionCounts> matrices;
  for (const auto& fold : report.folds) {
    p.push_back(fold.metrics.precision);
    r.push_back(fold.metrics.recall);
    f.push_back(fold.metrics.f1);
    matrices.push_back(fold.confusion);
  }
  report.precision = mean_std(p);
  report.recall = mean_std(r);
  report.f1 = mean_std(f);
  report.confusion = aggregate_confusion(matrices);
  return report;
}

}  // namespace ordcollab
