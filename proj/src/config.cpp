#include <fstream>
#include <initializer_list>

#include "ordcollab/error.hpp"
#include "ordcollab/experiment.hpp"
#include "ordcollab/snapshot.hpp"

namespace ordcollab {

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

}  // namespace

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"corpus", "modality", "mapping", "features", "model", "loss",
                  "class_balancing", "mixup", "train", "network", "pinned_groups", "seed",
                  "output_dir"},
                 "config");
  ExperimentConfig cfg;
  try {
    cfg.corpus = get<std::string>(j, "corpus", "", "config");
    cfg.modality = parse_modality(get<std::string>(j, "modality", "audio_video", "config"));
    cfg.mapping = parse_mapping(get<std::string>(j, "mapping", "B2toA", "config"));
    cfg.features = parse_feature_kind(get<std::string>(j, "features", "B2", "config"));
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  const auto model = get<std::string>(j, "model", "mlp", "config");
  if (model == "mlp") cfg.model = ModelKind::Mlp;
  else if (model == "majority") cfg.model = ModelKind::Majority;
  else throw ConfigError("unknown model '" + model + "' (expected mlp or majority)");

  if (j.contains("train")) {
    const auto& t = j.at("train");
    reject_unknown(t,
                   {"epochs", "batch_fraction", "learning_rate", "beta1", "beta2", "epsilon",
                    "patience", "factor", "min_lr", "min_delta"},
                   "config.train");
    for (const auto& [key, value] : t.items())
      if (!value.is_number()) throw ConfigError("config.train." + key + " must be a number");
    if (t.contains("epochs") && !t.at("epochs").is_number_unsigned())
      throw ConfigError("config.train.epochs must be a positive integer");
    if (t.contains("patience") && !t.at("patience").is_number_unsigned())
      throw ConfigError("config.train.patience must be a positive integer");
    cfg.train = train_config_from_json(t);
  }
  cfg.train.loss = parse_loss_kind(get<std::string>(j, "loss", "OCE", "config"));
  cfg.train.class_balancing = get<bool>(j, "class_balancing", false, "config");

  if (j.contains("mixup") && !j.at("mixup").is_null()) {
    const auto& m = j.at("mixup");
    reject_unknown(m, {"mode", "alpha", "tau", "n_per_class"}, "config.mixup");
    MixupConfig mix;
    mix.mode = parse_mixup_mode(get<std::string>(m, "mode", "Full", "config.mixup"));
    mix.alpha = get<double>(m, "alpha", mix.alpha, "config.mixup");
    mix.tau = get<double>(m, "tau", mix.tau, "config.mixup");
    if (m.contains("n_per_class") && !m.at("n_per_class").is_number_unsigned())
      throw ConfigError("config.mixup.n_per_class must be a positive integer");
    mix.n_per_class = get<std::size_t>(m, "n_per_class", mix.n_per_class, "config.mixup");
    cfg.mixup = mix;
  }

  if (j.contains("network")) {
    const auto& n = j.at("network");
    reject_unknown(n, {"hidden_width", "hidden_layers", "dropout"}, "config.network");
    cfg.network.hidden_width = get<std::size_t>(n, "hidden_width", cfg.network.hidden_width, "config.network");
    cfg.network.hidden_layers = get<std::size_t>(n, "hidden_layers", cfg.network.hidden_layers, "config.network");
    cfg.network.dropout = get<std::vector<double>>(n, "dropout", cfg.network.dropout, "config.network");
  }

  if (j.contains("pinned_groups")) {
    const auto& p = j.at("pinned_groups");
    if (p.is_string() && p.get<std::string>() == "auto") {
      cfg.pinned_groups.reset();
    } else if (p.is_array()) {
      std::set<std::string> groups;
      for (const auto& g : p) {
        if (!g.is_string()) throw ConfigError("config.pinned_groups entries must be strings");
        groups.insert(g.get<std::string>());
      }
      cfg.pinned_groups = std::move(groups);
    } else {
      throw ConfigError("config.pinned_groups must be \"auto\" or a list of group ids");
    }
  }

  if (j.contains("seed") && !j.at("seed").is_number_unsigned())
    throw ConfigError("config.seed must be a non-negative integer");
  cfg.seed = get<std::uint64_t>(j, "seed", 0, "config");
  cfg.output_dir = get<std::string>(j, "output_dir", "", "config");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

nlohmann::json to_json(const ExperimentConfig& cfg, bool for_echo) {
  nlohmann::json j;
  j["corpus"] = cfg.corpus;
  j["modality"] = std::string(to_string(cfg.modality));
  j["mapping"] = std::string(to_string(cfg.mapping));
  j["features"] = std::string(to_string(cfg.features));
  j["model"] = cfg.model == ModelKind::Mlp ? "mlp" : "majority";
  j["loss"] = std::string(to_string(cfg.train.loss));
  j["class_balancing"] = cfg.train.class_balancing;
  if (cfg.mixup) {
    j["mixup"] = {{"mode", std::string(to_string(cfg.mixup->mode))},
                  {"alpha", cfg.mixup->alpha},
                  {"tau", cfg.mixup->tau},
                  {"n_per_class", cfg.mixup->n_per_class}};
  } else {
    j["mixup"] = nullptr;
  }
  auto train = to_json(cfg.train);
  train.erase("loss");
  train.erase("class_balancing");
  j["train"] = train;
  j["network"] = {{"hidden_width", cfg.network.hidden_width},
                  {"hidden_layers", cfg.network.hidden_layers},
                  {"dropout", cfg.network.dropout}};
  if (cfg.pinned_groups) j["pinned_groups"] = *cfg.pinned_groups;
  else j["pinned_groups"] = "auto";
  j["seed"] = cfg.seed;
  if (!for_echo) j["output_dir"] = cfg.output_dir;
  return j;
}

}  // namespace ordcollab
