#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "ordcollab/mlp.hpp"
#include "ordcollab/trainer.hpp"

namespace ordcollab {

inline constexpr const char* kSnapshotFormat = "ordcollab.mlp";
inline constexpr int kSnapshotVersion = 1;

/// JSON container for a trained model. Layout (see docs/formats.md):
///   format, version, scalar ("float32" | "float64"), layer_dims,
///   dropout, activations, layers[{weights (row-major fan_in x fan_out),
///   bias}], train_config, metadata.
/// Values are written as the shortest decimal that reads back to the same
/// scalar, so save/load is bit-exact.
template <typename Scalar>
nlohmann::json snapshot_to_json(const Mlp<Scalar>& model, const nlohmann::json& train_config,
                                const nlohmann::json& metadata = nlohmann::json::object());

template <typename Scalar>
Mlp<Scalar> snapshot_from_json(const nlohmann::json& doc);

template <typename Scalar>
void save_snapshot(const std::filesystem::path& path, const Mlp<Scalar>& model,
                   const nlohmann::json& train_config,
                   const nlohmann::json& metadata = nlohmann::json::object());

template <typename Scalar>
Mlp<Scalar> load_snapshot(const std::filesystem::path& path);

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace ordcollab
