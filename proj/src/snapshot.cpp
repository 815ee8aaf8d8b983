#include "ordcollab/snapshot.hpp"

#include <fstream>
#include <type_traits>

#include "ordcollab/error.hpp"

namespace ordcollab {

namespace {

template <typename Scalar>
constexpr const char* scalar_name() {
  return std::is_same_v<Scalar, float> ? "float32" : "float64";
}

}  // namespace

template <typename Scalar>
nlohmann::json snapshot_to_json(const Mlp<Scalar>& model, const nlohmann::json& train_config,
                                const nlohmann::json& metadata) {
  const auto& shape = model.shape();
  nlohmann::json doc;
  doc["format"] = kSnapshotFormat;
  doc["version"] = kSnapshotVersion;
  doc["scalar"] = scalar_name<Scalar>();
  doc["layer_dims"] = shape.layer_dims();
  doc["dropout"] = shape.dropout;
  auto activations = nlohmann::json::array();
  for (std::size_t i = 0; i < shape.hidden_layers; ++i) activations.push_back("relu");
  activations.push_back("softmax");
  doc["activations"] = activations;
  auto layers = nlohmann::json::array();
  for (const auto& l : model.layers()) {
    // Row-major storage makes data() the documented order.
    std::vector<Scalar> w(l.weights.data(), l.weights.data() + l.weights.size());
    std::vector<Scalar> b(l.bias.data(), l.bias.data() + l.bias.size());
    layers.push_back({{"weights", w}, {"bias", b}});
  }
  doc["layers"] = std::move(layers);
  doc["train_config"] = train_config;
  doc["metadata"] = metadata;
  return doc;
}

template <typename Scalar>
Mlp<Scalar> snapshot_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format") != kSnapshotFormat) throw ParseError("not an ordcollab model snapshot");
    if (doc.at("version").get<int>() != kSnapshotVersion)
      throw ParseError("unsupported snapshot version " + doc.at("version").dump());
    if (doc.at("scalar") != scalar_name<Scalar>())
      throw ParseError("snapshot scalar type is " + doc.at("scalar").get<std::string>());
    const auto dims = doc.at("layer_dims").get<std::vector<std::size_t>>();
    if (dims.size() < 3 || dims.back() != kNumClasses) throw ParseError("bad layer_dims");
    MlpShape shape;
    shape.input_dim = dims.front();
    shape.hidden_width = dims[1];
    shape.hidden_layers = dims.size() - 2;
    for (std::size_t i = 1; i + 1 < dims.size(); ++i)
      if (dims[i] != shape.hidden_width) throw ParseError("hidden layers must share one width");
    shape.dropout = doc.at("dropout").get<std::vector<double>>();
    Mlp<Scalar> model(shape);
    const auto& layers = doc.at("layers");
    if (layers.size() != model.layers().size()) throw ParseError("layer count mismatch");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      auto& dst = model.layers()[l];
      const auto w = layers[l].at("weights").get<std::vector<Scalar>>();
      const auto b = layers[l].at("bias").get<std::vector<Scalar>>();
      if (static_cast<Eigen::Index>(w.size()) != dst.weights.size() ||
          static_cast<Eigen::Index>(b.size()) != dst.bias.size())
        throw ParseError("layer " + std::to_string(l) + " size mismatch");
      std::copy(w.begin(), w.end(), dst.weights.data());
      std::copy(b.begin(), b.end(), dst.bias.data());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed snapshot: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("malformed snapshot: ") + e.what());
  }
}

template <typename Scalar>
void save_snapshot(const std::filesystem::path& path, const Mlp<Scalar>& model,
                   const nlohmann::json& train_config, const nlohmann::json& metadata) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << snapshot_to_json(model, train_config, metadata).dump() << '\n';
}

template <typename Scalar>
Mlp<Scalar> load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return snapshot_from_json<Scalar>(doc);
}

nlohmann::json to_json(const TrainConfig& cfg) {
  return {{"epochs", cfg.epochs},
          {"batch_fraction", cfg.batch_fraction},
          {"loss", std::string(to_string(cfg.loss))},
          {"class_balancing", cfg.class_balancing},
          {"learning_rate", cfg.adam.learning_rate},
          {"beta1", cfg.adam.beta1},
          {"beta2", cfg.adam.beta2},
          {"epsilon", cfg.adam.epsilon},
          {"patience", cfg.plateau.patience},
          {"factor", cfg.plateau.factor},
          {"min_lr", cfg.plateau.min_lr},
          {"min_delta", cfg.plateau.min_delta}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  try {
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.batch_fraction = j.value("batch_fraction", cfg.batch_fraction);
    if (j.contains("loss")) cfg.loss = parse_loss_kind(j.at("loss").get<std::string>());
    cfg.class_balancing = j.value("class_balancing", cfg.class_balancing);
    cfg.adam.learning_rate = j.value("learning_rate", cfg.adam.learning_rate);
    cfg.adam.beta1 = j.value("beta1", cfg.adam.beta1);
    cfg.adam.beta2 = j.value("beta2", cfg.adam.beta2);
    cfg.adam.epsilon = j.value("epsilon", cfg.adam.epsilon);
    cfg.plateau.patience = j.value("patience", cfg.plateau.patience);
    cfg.plateau.factor = j.value("factor", cfg.plateau.factor);
    cfg.plateau.min_lr = j.value("min_lr", cfg.plateau.min_lr);
    cfg.plateau.min_delta = j.value("min_delta", cfg.plateau.min_delta);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid train config: ") + e.what());
  }
  return cfg;
}

#define ORDCOLLAB_INSTANTIATE(S)                                                          \
  template nlohmann::json snapshot_to_json<S>(const Mlp<S>&, const nlohmann::json&,       \
                                              const nlohmann::json&);                     \
  template Mlp<S> snapshot_from_json<S>(const nlohmann::json&);                           \
  template void save_snapshot<S>(const std::filesystem::path&, const Mlp<S>&,             \
                                 const nlohmann::json&, const nlohmann::json&);           \
  template Mlp<S> load_snapshot<S>(const std::filesystem::path&);

ORDCOLLAB_INSTANTIATE(float)
ORDCOLLAB_INSTANTIATE(double)

#undef ORDCOLLAB_INSTANTIATE

}  // namespace ordcollab
