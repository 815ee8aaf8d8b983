#include "ordcollab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "csv.hpp"
#include "ordcollab/error.hpp"
#include "ordcollab/experiment.hpp"
#include "ordcollab/snapshot.hpp"
#include "ordcollab/synth.hpp"

namespace ordcollab {

namespace {

/// Flag overrides shared by featurize/train/eval/sweep. Unset fields leave
/// the config file's value alone.
struct Overrides {
  std::string config_path;
  std::optional<std::string> corpus, modality, mapping, features, model, loss, mixup_mode;
  std::optional<bool> balancing;
  std::optional<double> tau, alpha, min_lr;
  std::optional<std::size_t> n_per_class, epochs, patience, hidden_width;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> pinned;
  bool no_mixup = false;
  std::optional<std::string> out;

  void attach(CLI::App* app, bool with_training) {
    app->add_option("-c,--config", config_path, "Experiment config (JSON)");
    app->add_option("--corpus", corpus, "Corpus directory");
    app->add_option("--modality", modality, "video | audio_video");
    app->add_option("--mapping", mapping, "B2toA | CtoA");
    app->add_option("--features", features, "B2 | C | B2plusC");
    app->add_option("--seed", seed, "Random seed (default: config, then ORDCOLLAB_SEED)");
    if (!with_training) return;
    app->add_option("--model", model, "mlp | majority");
    app->add_option("--loss", loss, "CE | OCE");
    app->add_option("--balancing", balancing, "Class-balanced loss weights (true/false)");
    app->add_option("--mixup-mode", mixup_mode, "Full | Limited (enables mixup)");
    app->add_option("--tau", tau, "Mixup lambda lower bound (enables mixup)");
    app->add_option("--alpha", alpha, "Mixup Beta(alpha, alpha) shape (enables mixup)");
    app->add_option("--n", n_per_class, "Mixup samples per class (enables mixup)");
    app->add_flag("--no-mixup", no_mixup, "Disable mixup");
    app->add_option("--epochs", epochs, "Training epochs");
    app->add_option("--patience", patience, "Plateau patience in epochs");
    app->add_option("--min-lr", min_lr, "Plateau learning-rate floor");
    app->add_option("--hidden-width", hidden_width, "Units per hidden layer");
    app->add_option("--pin", pinned, "Group kept in every training set (repeatable)");
  }

  ExperimentConfig resolve() const {
    nlohmann::json doc = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config " + config_path);
      try {
        in >> doc;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
    }
    auto cfg = experiment_config_from_json(doc);
    if (!doc.contains("seed")) {
      if (const char* env = std::getenv("ORDCOLLAB_SEED")) {
        try {
          cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
          throw ConfigError(std::string("ORDCOLLAB_SEED is not an integer: ") + env);
        }
      }
    }
    try {
      if (corpus) cfg.corpus = *corpus;
      if (modality) cfg.modality = parse_modality(*modality);
      if (mapping) cfg.mapping = parse_mapping(*mapping);
      if (features) cfg.features = parse_feature_kind(*features);
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
    if (model) {
      if (*model == "mlp") cfg.model = ModelKind::Mlp;
      else if (*model == "majority") cfg.model = ModelKind::Majority;
      else throw ConfigError("unknown model '" + *model + "' (expected mlp or majority)");
    }
    if (loss) cfg.train.loss = parse_loss_kind(*loss);
    if (balancing) cfg.train.class_balancing = *balancing;
    if (mixup_mode || tau || alpha || n_per_class) {
      if (!cfg.mixup) cfg.mixup = MixupConfig{};
      if (mixup_mode) cfg.mixup->mode = parse_mixup_mode(*mixup_mode);
      if (tau) cfg.mixup->tau = *tau;
      if (alpha) cfg.mixup->alpha = *alpha;
      if (n_per_class) cfg.mixup->n_per_class = *n_per_class;
    }
    if (no_mixup) cfg.mixup.reset();
    if (epochs) cfg.train.epochs = *epochs;
    if (patience) cfg.train.plateau.patience = *patience;
    if (min_lr) cfg.train.plateau.min_lr = *min_lr;
    if (hidden_width) cfg.network.hidden_width = *hidden_width;
    if (!pinned.empty()) cfg.pinned_groups = std::set<std::string>(pinned.begin(), pinned.end());
    if (seed) cfg.seed = *seed;
    if (out) cfg.output_dir = *out;
    cfg.validate();
    return cfg;
  }
};

std::string cell_name(double tau, std::size_t n, LossKind loss, bool balancing) {
  return "tau" + csv::format_double(tau) + "_n" + std::to_string(n) + "_" +
         std::string(to_string(loss)) + (balancing ? "_bal" : "_nobal");
}

template <typename T>
std::vector<T> parse_list(const std::vector<std::string>& items, T (*parse)(const std::string&)) {
  std::vector<T> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string token;
    while (std::getline(ss, token, ','))
      if (!token.empty()) out.push_back(parse(token));
  }
  return out;
}

double parse_double_arg(const std::string& s) {
  try {
    return csv::parse_double(s, "argument");
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

std::size_t parse_count_arg(const std::string& s) {
  const double v = parse_double_arg(s);
  if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v)))
    throw ConfigError("expected a positive integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

LossKind parse_loss_arg(const std::string& s) { return parse_loss_kind(s); }

bool parse_bool_arg(const std::string& s) {
  if (s == "true" || s == "1" || s == "on") return true;
  if (s == "false" || s == "0" || s == "off") return false;
  throw ConfigError("expected true/false, got '" + s + "'");
}

int cmd_synth(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, std::ostream& out) {
  nlohmann::json doc = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open synth config " + config_path);
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(config_path + ": " + e.what());
    }
  }
  if (!seed && !doc.contains("seed"))
    if (const char* env = std::getenv("ORDCOLLAB_SEED")) seed = std::stoull(env);
  if (seed) doc["seed"] = *seed;
  const auto cfg = synth_config_from_json(doc);
  const auto corpus = generate_corpus(cfg);
  write_synth_corpus(out_dir, corpus);
  std::ofstream(std::filesystem::path(out_dir) / "synth_config.json") << to_json(cfg).dump(2) << '\n';
  out << "wrote " << corpus.tasks.size() << " tasks to " << out_dir << '\n';
  return kExitOk;
}

int cmd_featurize(const ExperimentConfig& cfg, const std::string& out_path, std::ostream& out) {
  const auto dataset = load_experiment_dataset(cfg);
  write_dataset_csv(out_path, dataset);
  out << "wrote " << dataset.size() << " samples (" << to_string(dataset.feature_kind) << ", "
      << dataset.dimension() << " features) to " << out_path << '\n';
  return kExitOk;
}

int cmd_train(const ExperimentConfig& cfg, const std::string& fold_group,
              const std::string& out_path, std::ostream& out) {
  if (cfg.model != ModelKind::Mlp) throw ConfigError("train: only the mlp model has a snapshot");
  const auto dataset = load_experiment_dataset(cfg);
  const auto folds = logo_splits(dataset, resolve_pinned_groups(dataset, cfg));
  std::size_t index = 0;
  if (!fold_group.empty()) {
    auto it = std::find_if(folds.begin(), folds.end(),
                           [&](const FoldSpec& f) { return f.held_out_group == fold_group; });
    if (it == folds.end()) throw ConfigError("train: no fold holds out group '" + fold_group + "'");
    index = static_cast<std::size_t>(it - folds.begin());
  }
  FoldModel fm;
  try {
    fm = run_fold(dataset, folds[index], index, cfg);
  } catch (const Error& e) {
    throw TrainingError("fold " + std::to_string(index + 1) + " (held-out group '" +
                        folds[index].held_out_group + "'): " + e.what());
  }
  auto history = nlohmann::json::array();
  for (const auto& h : fm.history)
    history.push_back({{"train_loss", h.train_loss}, {"test_loss", h.test_loss},
                       {"learning_rate", h.learning_rate}});
  nlohmann::json meta = {{"version", version_string()},
                         {"experiment", to_json(cfg, true)},
                         {"held_out_group", fm.result.held_out_group},
                         {"best_epoch", fm.result.best_epoch + 1},
                         {"best_test_loss", fm.result.best_test_loss},
                         {"weighted_precision", fm.result.metrics.precision},
                         {"weighted_recall", fm.result.metrics.recall},
                         {"weighted_f1", fm.result.metrics.f1},
                         {"history", history}};
  const auto parent = std::filesystem::path(out_path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  save_snapshot(out_path, fm.model, to_json(cfg.train), meta);
  out << "fold " << fm.result.held_out_group << ": weighted F1 " << fm.result.metrics.f1
      << ", best epoch " << fm.result.best_epoch + 1 << "; snapshot written to " << out_path
      << '\n';
  return kExitOk;
}

int cmd_eval(const ExperimentConfig& cfg, std::size_t jobs, std::ostream& out) {
  if (cfg.output_dir.empty()) throw ConfigError("eval: an output directory is required (--out)");
  const auto report = run_experiment(cfg, RunOptions{jobs});
  write_report(cfg.output_dir, report);
  out << render_report(to_json(report));
  return kExitOk;
}

struct SweepCell {
  std::string name;
  ExperimentConfig cfg;
  EvalReport report;
  std::exception_ptr error;
};

int cmd_sweep(const ExperimentConfig& base, const std::vector<std::string>& tau_args,
              const std::vector<std::string>& n_args, const std::vector<std::string>& loss_args,
              const std::vector<std::string>& bal_args, std::size_t jobs, std::ostream& out) {
  if (base.output_dir.empty()) throw ConfigError("sweep: an output directory is required (--out)");
  const MixupConfig mix0 = base.mixup.value_or(MixupConfig{});
  auto taus = parse_list<double>(tau_args, parse_double_arg);
  auto ns = parse_list<std::size_t>(n_args, parse_count_arg);
  auto losses = parse_list<LossKind>(loss_args, parse_loss_arg);
  auto bals = parse_list<bool>(bal_args, parse_bool_arg);
  if (taus.empty()) taus = {mix0.tau};
  if (ns.empty()) ns = {mix0.n_per_class};
  if (losses.empty()) losses = {base.train.loss};
  if (bals.empty()) bals = {base.train.class_balancing};

  std::vector<SweepCell> cells;
  for (double tau : taus)
    for (auto n : ns)
      for (auto loss : losses)
        for (bool bal : bals) {
          SweepCell cell;
          cell.cfg = base;
          cell.cfg.mixup = mix0;
          cell.cfg.mixup->tau = tau;
          cell.cfg.mixup->n_per_class = n;
          cell.cfg.train.loss = loss;
          cell.cfg.train.class_balancing = bal;
          cell.name = cell_name(tau, n, loss, bal);
          cell.cfg.output_dir = (std::filesystem::path(base.output_dir) / cell.name).string();
          cell.cfg.validate();
          cells.push_back(std::move(cell));
        }

  const auto dataset = load_experiment_dataset(base);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        cells[i].report = run_experiment(dataset, cells[i].cfg);
        write_report(cells[i].cfg.output_dir, cells[i].report);
      } catch (...) {
        cells[i].error = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, cells.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < threads; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& cell : cells) {
    if (!cell.error) continue;
    try {
      std::rethrow_exception(cell.error);
    } catch (const std::exception& e) {
      throw TrainingError("sweep cell " + cell.name + ": " + e.what());
    }
  }

  std::ofstream summary(std::filesystem::path(base.output_dir) / "summary.csv");
  csv::write_row(summary, {"cell", "tau", "n_per_class", "loss", "class_balancing",
                           "precision_mean", "precision_std", "recall_mean", "recall_std",
                           "f1_mean", "f1_std"});
  for (const auto& cell : cells) {
    const auto& r = cell.report;
    csv::write_row(summary,
                   {cell.name, csv::format_double(cell.cfg.mixup->tau),
                    std::to_string(cell.cfg.mixup->n_per_class),
                    std::string(to_string(cell.cfg.train.loss)),
                    cell.cfg.train.class_balancing ? "true" : "false",
                    csv::format_double(r.precision.mean), csv::format_double(r.precision.std),
                    csv::format_double(r.recall.mean), csv::format_double(r.recall.std),
                    csv::format_double(r.f1.mean), csv::format_double(r.f1.std)});
    out << cell.name << ": precision " << r.precision.mean << " recall " << r.recall.mean
        << " f1 " << r.f1.mean << '\n';
  }
  out << "wrote " << cells.size() << " reports to " << base.output_dir << '\n';
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& paths, bool confusion_only, std::ostream& out) {
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::ifstream in(paths[i]);
    if (!in) throw ParseError("cannot open report " + paths[i]);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(paths[i] + ": " + e.what());
    }
    if (i) out << '\n';
    if (paths.size() > 1) out << "== " << paths[i] << '\n';
    out << (confusion_only ? render_confusion(doc) : render_report(doc));
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ordinal classification of group collaboration from coded timelines", "ordcollab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  std::string synth_config, synth_out;
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("-c,--config", synth_config, "Synth config (JSON)");
  synth->add_option("-o,--out", synth_out, "Output corpus directory")->required();
  synth->add_option("--seed", synth_seed, "Random seed");

  auto* featurize = app.add_subcommand("featurize", "Write the histogram dataset CSV");
  Overrides feat_over;
  std::string feat_out;
  feat_over.attach(featurize, false);
  featurize->add_option("-o,--out", feat_out, "Dataset CSV path")->required();

  auto* train_cmd = app.add_subcommand("train", "Train one fold and write a model snapshot");
  Overrides train_over;
  std::string train_fold, train_out;
  train_over.attach(train_cmd, true);
  train_cmd->add_option("--fold", train_fold, "Held-out group (default: first fold)");
  train_cmd->add_option("-o,--out", train_out, "Snapshot path")->required();

  auto* eval = app.add_subcommand("eval", "Run leave-one-group-out evaluation");
  Overrides eval_over;
  std::size_t eval_jobs = 1;
  eval_over.attach(eval, true);
  eval->add_option("-o,--out", eval_over.out, "Report directory");
  eval->add_option("-j,--jobs", eval_jobs, "Folds run concurrently");

  auto* sweep = app.add_subcommand("sweep", "Run a grid of mixup/loss settings");
  Overrides sweep_over;
  std::vector<std::string> taus, ns, losses, bals;
  std::size_t sweep_jobs = 1;
  sweep_over.attach(sweep, true);
  sweep->add_option("-o,--out", sweep_over.out, "Sweep output directory");
  sweep->add_option("--taus", taus, "Comma separated tau values");
  sweep->add_option("--ns", ns, "Comma separated samples-per-class values");
  sweep->add_option("--losses", losses, "Comma separated losses (CE,OCE)");
  sweep->add_option("--balancings", bals, "Comma separated true/false");
  sweep->add_option("-j,--jobs", sweep_jobs, "Cells run concurrently");

  auto* report = app.add_subcommand("report", "Render report JSON files as text");
  std::vector<std::string> report_paths;
  bool confusion_only = false;
  report->add_option("reports", report_paths, "report.json files")->required();
  report->add_flag("--confusion", confusion_only, "Only the confusion matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version_string() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream help;
    const auto code = app.exit(e, help, help);
    if (code == 0) {
      out << help.str();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  // Validation happens before any work; errors raised afterwards are runtime failures.
  auto stage = kExitValidation;
  try {
    if (synth->parsed()) return cmd_synth(synth_config, synth_out, synth_seed, out);
    if (featurize->parsed()) {
      auto cfg = feat_over.resolve();
      stage = kExitRuntime;
      return cmd_featurize(cfg, feat_out, out);
    }
    if (train_cmd->parsed()) {
      auto cfg = train_over.resolve();
      stage = kExitRuntime;
      return cmd_train(cfg, train_fold, train_out, out);
    }
    if (eval->parsed()) {
      auto cfg = eval_over.resolve();
      if (cfg.output_dir.empty()) throw ConfigError("eval: an output directory is required (--out)");
      stage = kExitRuntime;
      return cmd_eval(cfg, eval_jobs, out);
    }
    if (sweep->parsed()) {
      auto cfg = sweep_over.resolve();
      if (cfg.output_dir.empty()) throw ConfigError("sweep: an output directory is required (--out)");
      stage = kExitRuntime;
      return cmd_sweep(cfg, taus, ns, losses, bals, sweep_jobs, out);
    }
    if (report->parsed()) {
      stage = kExitRuntime;
      return cmd_report(report_paths, confusion_only, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return stage;
  }
  return kExitValidation;
}

}  // namespace ordcollab
