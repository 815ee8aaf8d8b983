#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ordcollab/labels.hpp"

namespace ordcollab {

enum class Modality { Video, AudioVideo };

std::string_view to_string(Modality modality);
Modality parse_modality(std::string_view text);

/// One coded span of a student's timeline, half-open [start, end).
struct Segment {
  std::string coder_id;
  std::string student_id;
  Level level = Level::B2;
  std::size_t code = 0;
  double start = 0.0;
  double end = 0.0;
};

/// One group's coded task under one modality.
struct TaskRecording {
  std::string group_id;
  std::string task_id;
  Modality modality = Modality::AudioVideo;
  double duration = 0.0;  // end of the last segment
  std::vector<Segment> b2_segments;
  std::vector<Segment> c_segments;
  std::map<std::string, std::size_t> level_a_codes;  // coder -> label index

  std::vector<std::string> b2_coders() const;
};

enum class FeatureKind { B2, C, B2plusC };
enum class Mapping { B2toA, CtoA };

std::string_view to_string(FeatureKind kind);
std::string_view to_string(Mapping mapping);
FeatureKind parse_feature_kind(std::string_view text);
Mapping parse_mapping(std::string_view text);
std::size_t feature_dimension(FeatureKind kind);

using LabelVector = std::array<double, kNumClasses>;

LabelVector one_hot(std::size_t label);

struct FeatureSample {
  std::vector<double> features;
  LabelVector label{};
  std::string group_id;
  std::string task_id;
  std::string coder_id;  // empty for adjudicated (C-level) samples
  std::size_t id = 0;    // position in the dataset it was built into
  bool synthetic = false;
  // Mixup parents (ids in the source training set) when synthetic.
  std::size_t primary_parent = 0;
  std::size_t adjacent_parent = 0;

  std::size_t label_index() const { return argmax(label); }
};

struct Dataset {
  FeatureKind feature_kind = FeatureKind::B2;
  std::vector<FeatureSample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::size_t dimension() const { return feature_dimension(feature_kind); }
  /// Sample counts by argmax label.
  std::array<std::size_t, kNumClasses> class_counts() const;
  std::vector<std::string> groups() const;  // sorted, unique
  /// Subset in the given order; ids are preserved.
  Dataset subset(std::span<const std::size_t> indices) const;
};

/// Reads `segments.csv` and `adjudication.csv` from a corpus directory.
std::vector<TaskRecording> parse_corpus(const std::filesystem::path& corpus_dir);
std::vector<TaskRecording> parse_corpus(const std::filesystem::path& segments_csv,
                                        const std::filesystem::path& adjudication_csv);

/// Writes the two corpus CSV files into `corpus_dir`.
void write_corpus(const std::filesystem::path& corpus_dir, std::span<const TaskRecording> tasks);

/// Checks the per-task timeline invariants; throws DataError on violation.
void validate_task(const TaskRecording& task);

/// Adjudicates three coder labels: the repeated code if any, else the median.
std::size_t majority_label(std::array<std::size_t, 3> codes);

std::vector<double> b2_histogram(const TaskRecording& task, std::string_view coder_id);
/// B2 histogram pooled over every B2 coder of the task.
std::vector<double> b2_histogram_pooled(const TaskRecording& task);
std::vector<double> c_histogram(const TaskRecording& task);
/// Raw (unnormalized) grid counts behind c_histogram.
std::vector<std::size_t> c_grid_counts(const TaskRecording& task);

/// Ground-truth label of a task: majority of three coders, or the single
/// coder's label when only one exists.
std::size_t adjudicated_label(const TaskRecording& task);

Dataset build_dataset(std::span<const TaskRecording> tasks, FeatureKind kind, Mapping mapping);

/// Keeps only the tasks recorded under `modality`.
std::vector<TaskRecording> select_modality(std::span<const TaskRecording> tasks,
                                           Modality modality);

/// Dataset CSV: id,group_id,task_id,coder_id,synthetic,x0..,y0..y4.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace ordcollab
