#include "ordcollab/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <tuple>

#include "csv.hpp"
#include "ordcollab/error.hpp"

namespace ordcollab {

namespace {

constexpr double kB2SegmentSeconds = 60.0;
constexpr double kTimeTolerance = 1e-6;

std::vector<double> normalize(const std::vector<std::size_t>& counts) {
  double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<double> out(counts.size(), 0.0);
  if (total <= 0.0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / total;
  return out;
}

std::string task_name(const TaskRecording& t) {
  return t.group_id + "/" + t.task_id + "/" + std::string(to_string(t.modality));
}

using TaskKey = std::tuple<std::string, std::string, Modality>;

}  // namespace

std::string_view to_string(Modality modality) {
  return modality == Modality::Video ? "video" : "audio_video";
}

Modality parse_modality(std::string_view text) {
  if (text == "video") return Modality::Video;
  if (text == "audio_video") return Modality::AudioVideo;
  throw ParseError("unknown modality '" + std::string(text) + "' (expected video or audio_video)");
}

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::B2: return "B2";
    case FeatureKind::C: return "C";
    case FeatureKind::B2plusC: return "B2plusC";
  }
  return "?";
}

std::string_view to_string(Mapping mapping) {
  return mapping == Mapping::B2toA ? "B2toA" : "CtoA";
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "B2") return FeatureKind::B2;
  if (text == "C") return FeatureKind::C;
  if (text == "B2plusC" || text == "B2+C") return FeatureKind::B2plusC;
  throw ConfigError("unknown feature kind '" + std::string(text) + "' (expected B2, C or B2plusC)");
}

Mapping parse_mapping(std::string_view text) {
  if (text == "B2toA") return Mapping::B2toA;
  if (text == "CtoA") return Mapping::CtoA;
  throw ConfigError("unknown mapping '" + std::string(text) + "' (expected B2toA or CtoA)");
}

std::size_t feature_dimension(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::B2: return kB2Codes;
    case FeatureKind::C: return kCCodes;
    case FeatureKind::B2plusC: return kB2Codes + kCCodes;
  }
  return 0;
}

LabelVector one_hot(std::size_t label) {
  if (label >= kNumClasses) throw std::out_of_range("label index out of range");
  LabelVector y{};
  y[label] = 1.0;
  return y;
}

std::vector<std::string> TaskRecording::b2_coders() const {
  std::set<std::string> coders;
  for (const auto& s : b2_segments) coders.insert(s.coder_id);
  return {coders.begin(), coders.end()};
}

std::array<std::size_t, kNumClasses> Dataset::class_counts() const {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& s : samples) ++counts[s.label_index()];
  return counts;
}

std::vector<std::string> Dataset::groups() const {
  std::set<std::string> g;
  for (const auto& s : samples) g.insert(s.group_id);
  return {g.begin(), g.end()};
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.feature_kind = feature_kind;
  out.samples.reserve(indices.size());
  for (auto i : indices) out.samples.push_back(samples.at(i));
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

std::vector<TaskRecording> parse_corpus(const std::filesystem::path& corpus_dir) {
  return parse_corpus(corpus_dir / "segments.csv", corpus_dir / "adjudication.csv");
}

std::vector<TaskRecording> parse_corpus(const std::filesystem::path& segments_csv,
                                        const std::filesystem::path& adjudication_csv) {
  auto segments = csv::Table::read(segments_csv);
  const auto c_group = segments.column("group_id");
  const auto c_task = segments.column("task_id");
  const auto c_modality = segments.column("modality");
  const auto c_coder = segments.column("coder_id");
  const auto c_student = segments.column("student_id");
  const auto c_level = segments.column("level");
  const auto c_code = segments.column("code");
  const auto c_start = segments.column("start_s");
  const auto c_end = segments.column("end_s");

  std::map<TaskKey, TaskRecording> tasks;
  for (const auto& row : segments.rows()) {
    const auto where = segments.source() + " line " + std::to_string(row.line);
    const auto& f = row.fields;
    Segment seg;
    Modality modality;
    try {
      modality = parse_modality(f[c_modality]);
      seg.level = parse_level(f[c_level]);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    const auto& scheme = CodeScheme::for_level(seg.level);
    auto code = scheme.find(f[c_code]);
    if (!code)
      throw ParseError("unknown code '" + f[c_code] + "' at line " + std::to_string(row.line) +
                       " of " + segments.source());
    seg.code = *code;
    seg.coder_id = f[c_coder];
    seg.student_id = f[c_student];
    seg.start = csv::parse_double(f[c_start], where);
    seg.end = csv::parse_double(f[c_end], where);
    if (!(seg.start >= 0.0)) throw ParseError(where + ": negative start time");
    if (!(seg.end > seg.start)) throw ParseError(where + ": end must be greater than start");
    if (f[c_group].empty() || f[c_task].empty() || seg.coder_id.empty() || seg.student_id.empty())
      throw ParseError(where + ": empty identifier");

    TaskKey key{f[c_group], f[c_task], modality};
    auto& task = tasks[key];
    if (task.group_id.empty()) {
      task.group_id = f[c_group];
      task.task_id = f[c_task];
      task.modality = modality;
    }
    task.duration = std::max(task.duration, seg.end);
    (seg.level == Level::B2 ? task.b2_segments : task.c_segments).push_back(std::move(seg));
  }

  auto adjudication = csv::Table::read(adjudication_csv);
  for (auto name : {"group_id", "task_id", "modality", "coder_id", "level_a_code"})
    if (!adjudication.has_column(name))
      throw ParseError(adjudication.source() + ": missing Level A adjudication column '" +
                       std::string(name) + "'");
  const auto a_group = adjudication.column("group_id");
  const auto a_task = adjudication.column("task_id");
  const auto a_modality = adjudication.column("modality");
  const auto a_coder = adjudication.column("coder_id");
  const auto a_code = adjudication.column("level_a_code");
  const auto& labels = OrdinalLabelScheme::standard();
  for (const auto& row : adjudication.rows()) {
    const auto where = adjudication.source() + " line " + std::to_string(row.line);
    const auto& f = row.fields;
    try {
      TaskKey key{f[a_group], f[a_task], parse_modality(f[a_modality])};
      auto it = tasks.find(key);
      if (it == tasks.end()) throw ParseError("adjudication for a task with no segments");
      auto label = labels.index_of(f[a_code]);
      if (!it->second.level_a_codes.emplace(f[a_coder], label).second)
        throw ParseError("duplicate Level A code for coder '" + f[a_coder] + "'");
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }

  std::vector<TaskRecording> out;
  out.reserve(tasks.size());
  for (auto& [key, task] : tasks) {
    if (task.level_a_codes.empty())
      throw ParseError(adjudication.source() + ": task " + task_name(task) +
                       " has no Level A adjudication");
    try {
      validate_task(task);
    } catch (const DataError& e) {
      throw ParseError(segments.source() + ": " + e.what());
    }
    out.push_back(std::move(task));
  }
  return out;
}

void validate_task(const TaskRecording& task) {
  const auto name = task_name(task);
  std::map<std::pair<std::string, std::string>, std::vector<const Segment*>> b2, c;
  for (const auto& s : task.b2_segments) b2[{s.coder_id, s.student_id}].push_back(&s);
  for (const auto& s : task.c_segments) c[{s.coder_id, s.student_id}].push_back(&s);
  auto by_start = [](const Segment* a, const Segment* b) { return a->start < b->start; };

  for (auto& [who, segs] : c) {
    std::sort(segs.begin(), segs.end(), by_start);
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (segs[i]->end > task.duration + kTimeTolerance)
        throw DataError(name + ": C segment beyond task duration");
      if (i && segs[i]->start < segs[i - 1]->end - kTimeTolerance)
        throw DataError(name + ": overlapping C segments for coder '" + who.first +
                        "' student '" + who.second + "'");
    }
  }

  double b2_end = 0.0;
  for (const auto& s : task.b2_segments) b2_end = std::max(b2_end, s.end);
  for (auto& [who, segs] : b2) {
    std::sort(segs.begin(), segs.end(), by_start);
    const auto label = "coder '" + who.first + "' student '" + who.second + "'";
    double cursor = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const auto& s = *segs[i];
      if (std::abs(s.start - cursor) > kTimeTolerance)
        throw DataError(name + ": B2 segments for " + label + " do not tile the task (gap or "
                        "overlap at " + csv::format_double(s.start) + " s)");
      const double length = s.end - s.start;
      const bool last = i + 1 == segs.size();
      if (length > kB2SegmentSeconds + kTimeTolerance ||
          (!last && length < kB2SegmentSeconds - kTimeTolerance))
        throw DataError(name + ": B2 segment for " + label + " at " +
                        csv::format_double(s.start) + " s is not one minute long");
      cursor = s.end;
    }
    if (std::abs(cursor - b2_end) > kTimeTolerance)
      throw DataError(name + ": B2 segments for " + label + " end before the task does");
  }
}

void write_corpus(const std::filesystem::path& corpus_dir, std::span<const TaskRecording> tasks) {
  std::filesystem::create_directories(corpus_dir);
  std::ofstream seg(corpus_dir / "segments.csv");
  std::ofstream adj(corpus_dir / "adjudication.csv");
  if (!seg || !adj) throw Error("cannot write corpus files in " + corpus_dir.string());
  csv::write_row(seg, {"group_id", "task_id", "modality", "coder_id", "student_id", "level",
                       "code", "start_s", "end_s"});
  csv::write_row(adj, {"group_id", "task_id", "modality", "coder_id", "level_a_code"});
  const auto& labels = OrdinalLabelScheme::standard();
  for (const auto& task : tasks) {
    const std::string modality(to_string(task.modality));
    for (const auto* list : {&task.b2_segments, &task.c_segments}) {
      for (const auto& s : *list) {
        const auto& scheme = CodeScheme::for_level(s.level);
        csv::write_row(seg, {task.group_id, task.task_id, modality, s.coder_id, s.student_id,
                             std::string(to_string(s.level)), scheme.token(s.code),
                             csv::format_double(s.start), csv::format_double(s.end)});
      }
    }
    for (const auto& [coder, label] : task.level_a_codes)
      csv::write_row(adj, {task.group_id, task.task_id, modality, coder, labels.name(label)});
  }
}

// ---------------------------------------------------------------------------
// Labels and histograms

std::size_t majority_label(std::array<std::size_t, 3> codes) {
  for (auto c : codes)
    if (c >= kNumClasses) throw std::out_of_range("Level A code out of range");
  if (codes[0] == codes[1] || codes[0] == codes[2]) return codes[0];
  if (codes[1] == codes[2]) return codes[1];
  std::sort(codes.begin(), codes.end());
  return codes[1];
}

std::size_t adjudicated_label(const TaskRecording& task) {
  const auto& codes = task.level_a_codes;
  if (codes.size() == 1) return codes.begin()->second;
  if (codes.size() == 3) {
    std::array<std::size_t, 3> three{};
    std::size_t i = 0;
    for (const auto& [coder, label] : codes) three[i++] = label;
    return majority_label(three);
  }
  throw DataError("task " + task_name(task) + " needs 1 or 3 Level A codes, found " +
                  std::to_string(codes.size()));
}

std::vector<double> b2_histogram(const TaskRecording& task, std::string_view coder_id) {
  std::vector<std::size_t> counts(kB2Codes, 0);
  std::size_t total = 0;
  for (const auto& s : task.b2_segments) {
    if (s.coder_id != coder_id) continue;
    ++counts[s.code];
    ++total;
  }
  if (total == 0)
    throw DataError("empty timeline: no B2 segments for coder '" + std::string(coder_id) +
                    "' in task " + task_name(task));
  return normalize(counts);
}

std::vector<double> b2_histogram_pooled(const TaskRecording& task) {
  if (task.b2_segments.empty())
    throw DataError("empty timeline: no B2 segments in task " + task_name(task));
  std::vector<std::size_t> counts(kB2Codes, 0);
  for (const auto& s : task.b2_segments) ++counts[s.code];
  return normalize(counts);
}

std::vector<std::size_t> c_grid_counts(const TaskRecording& task) {
  std::vector<std::size_t> counts(kCCodes, 0);
  // Grid points are k/10 seconds; computing each point by division keeps
  // them identical to decimal boundaries parsed from text.
  auto grid = [](long k) { return static_cast<double>(k) / 10.0; };
  for (const auto& s : task.c_segments) {
    long k = std::max(0L, static_cast<long>(std::floor(s.start * 10.0)) - 1);
    while (grid(k) < s.start) ++k;
    for (; grid(k) < s.end && grid(k) < task.duration; ++k) ++counts[s.code];
  }
  return counts;
}

std::vector<double> c_histogram(const TaskRecording& task) {
  if (task.c_segments.empty())
    throw DataError("empty timeline: no C segments in task " + task_name(task));
  auto counts = c_grid_counts(task);
  if (std::accumulate(counts.begin(), counts.end(), std::size_t{0}) == 0)
    throw DataError("empty timeline: C segments of task " + task_name(task) +
                    " cover no grid point");
  return normalize(counts);
}

// ---------------------------------------------------------------------------
// Dataset construction

std::vector<TaskRecording> select_modality(std::span<const TaskRecording> tasks,
                                           Modality modality) {
  std::vector<TaskRecording> out;
  for (const auto& t : tasks)
    if (t.modality == modality) out.push_back(t);
  return out;
}

Dataset build_dataset(std::span<const TaskRecording> tasks, FeatureKind kind, Mapping mapping) {
  Dataset ds;
  ds.feature_kind = kind;
  if (tasks.empty()) return ds;
  for (const auto& t : tasks)
    if (t.modality != tasks.front().modality)
      throw DataError("build_dataset: tasks mix modalities (" + task_name(tasks.front()) +
                      " vs " + task_name(t) + ")");

  auto features_for = [&](const TaskRecording& task, const std::string* coder) {
    std::vector<double> b2, c;
    if (kind != FeatureKind::C) {
      if (task.b2_segments.empty())
        throw DataError("task " + task_name(task) + " lacks B2 coding required for " +
                        std::string(to_string(kind)) + " features");
      b2 = coder ? b2_histogram(task, *coder) : b2_histogram_pooled(task);
    }
    if (kind != FeatureKind::B2) c = c_histogram(task);
    if (kind == FeatureKind::B2) return b2;
    if (kind == FeatureKind::C) return c;
    std::vector<double> both;
    both.reserve(b2.size() + c.size());
    for (double v : b2) both.push_back(0.5 * v);
    for (double v : c) both.push_back(0.5 * v);
    return both;
  };

  for (const auto& task : tasks) {
    if (mapping == Mapping::B2toA) {
      for (const auto& [coder, label] : task.level_a_codes) {
        FeatureSample s;
        s.features = features_for(task, &coder);
        s.label = one_hot(label);
        s.group_id = task.group_id;
        s.task_id = task.task_id;
        s.coder_id = coder;
        ds.samples.push_back(std::move(s));
      }
    } else {
      FeatureSample s;
      s.features = features_for(task, nullptr);
      s.label = one_hot(adjudicated_label(task));
      s.group_id = task.group_id;
      s.task_id = task.task_id;
      ds.samples.push_back(std::move(s));
    }
  }
  for (std::size_t i = 0; i < ds.samples.size(); ++i) ds.samples[i].id = i;
  return ds;
}

}  // namespace ordcollab
