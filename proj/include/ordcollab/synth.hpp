#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ordcollab/corpus.hpp"
#include "ordcollab/labels.hpp"

namespace ordcollab {

/// Generator settings for a synthetic classroom corpus. Each task gets a
/// true Level A label; its code distributions are Dirichlet draws around
/// the label's prototype, and the three coders' Level A judgments are the
/// true label or an ordinal neighbour.
struct SynthConfig {
  std::size_t n_groups = 15;
  std::vector<std::size_t> students_per_group;  // empty: 4 each, except 3 and 5 for the last two of 15
  std::size_t tasks_per_group = 12;             // upper bound per group
  std::size_t total_tasks = 117;                // spread as evenly as possible
  std::array<double, kNumClasses> label_proportions{0.07, 0.23, 0.40, 0.21, 0.09};
  std::vector<std::vector<double>> b2_prototypes;  // 5 x 7; empty: defaults
  std::vector<std::vector<double>> c_prototypes;   // 5 x 23; empty: defaults
  double concentration = 30.0;         // kappa: task distribution ~ Dirichlet(kappa * prototype)
  double coder_concentration = 200.0;  // per-coder B2 jitter around the task distribution
  double coder_agreement = 0.85;       // P(coder reports the true label)
  double min_duration_s = 300.0;
  double max_duration_s = 900.0;
  Modality modality = Modality::AudioVideo;
  std::uint64_t seed = 0;

  void validate() const;
  std::vector<std::size_t> students() const;
  std::vector<std::size_t> tasks_per_group_counts() const;
};

/// Default per-class prototypes: a linear path between an "effective" and a
/// "working independently" code profile, so prototype distance grows with
/// ordinal distance.
std::vector<std::vector<double>> default_b2_prototypes();
std::vector<std::vector<double>> default_c_prototypes();

struct TruthRow {
  std::string group_id;
  std::string task_id;
  std::size_t true_label = 0;
};

struct SynthCorpus {
  std::vector<TaskRecording> tasks;
  std::vector<TruthRow> truth;
};

SynthCorpus generate_corpus(const SynthConfig& cfg);

/// segments.csv + adjudication.csv + truth.csv
void write_synth_corpus(const std::filesystem::path& dir, const SynthCorpus& corpus);
std::vector<TruthRow> read_truth_csv(const std::filesystem::path& path);

SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthConfig& cfg);

/// Index of the prototype closest to `features` in L1 distance.
std::size_t nearest_prototype(std::span<const double> features,
                              const std::vector<std::vector<double>>& prototypes);

/// Total-variation distance between two distributions.
double total_variation(std::span<const double> a, std::span<const double> b);

}  // namespace ordcollab
