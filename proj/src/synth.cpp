#include "ordcollab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "csv.hpp"
#include "ordcollab/error.hpp"
#include "ordcollab/rng.hpp"

namespace ordcollab {

namespace {

std::vector<double> normalized(std::vector<double> v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (auto& x : v) x /= total;
  return v;
}

std::vector<std::vector<double>> interpolate(const std::vector<double>& best,
                                             const std::vector<double>& worst) {
  const auto a = normalized(best);
  const auto b = normalized(worst);
  std::vector<std::vector<double>> out;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double t = static_cast<double>(c) / static_cast<double>(kNumClasses - 1);
    std::vector<double> p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = (1.0 - t) * a[i] + t * b[i];
    out.push_back(std::move(p));
  }
  return out;
}

/// Splits `total` into integer counts proportional to `weights`
/// (largest remainder, ties to the lowest index).
std::vector<std::size_t> apportion(std::size_t total, std::span<const double> weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - static_cast<double>(counts[i]), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[remainders[k].second];
  return counts;
}

std::vector<double> dirichlet(std::span<const double> mean, double concentration, Rng& rng) {
  std::vector<double> out(mean.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    std::gamma_distribution<double> gamma(concentration * mean[i], 1.0);
    out[i] = gamma(rng);
    total += out[i];
  }
  if (!(total > 0.0)) return {mean.begin(), mean.end()};
  for (auto& x : out) x /= total;
  return out;
}

std::size_t draw_categorical(std::span<const double> p, Rng& rng) {
  double u = uniform01(rng);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (u < p[i]) return i;
    u -= p[i];
  }
  return p.size() - 1;
}

std::string padded(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%02zu", prefix, n);
  return buf;
}

void check_prototypes(const std::vector<std::vector<double>>& protos, std::size_t dim,
                      const char* name) {
  if (protos.size() != kNumClasses)
    throw ConfigError(std::string(name) + " needs one prototype per class (5)");
  for (const auto& p : protos) {
    if (p.size() != dim)
      throw ConfigError(std::string(name) + " prototypes must have " + std::to_string(dim) +
                        " entries");
    double sum = 0.0;
    for (double v : p) {
      if (!(v > 0.0)) throw ConfigError(std::string(name) + " prototype entries must be > 0");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError(std::string(name) + " prototypes must sum to 1");
  }
}

// Deciseconds keep every written time an exact short decimal.
double ds_to_seconds(long ds) { return static_cast<double>(ds) / 10.0; }

}  // namespace

std::vector<std::vector<double>> default_b2_prototypes() {
  // GG, C, F, CR, CI, OT, LS
  return interpolate({0.26, 0.38, 0.14, 0.13, 0.03, 0.03, 0.03},
                     {0.03, 0.10, 0.10, 0.02, 0.09, 0.26, 0.40});
}

std::vector<std::vector<double>> default_c_prototypes() {
  return interpolate(
      // talking .. problem solving, recognizing .. agreeing, off-task .. waiting
      {0.10, 0.04, 0.04, 0.06, 0.03, 0.10, 0.10, 0.10, 0.06, 0.04, 0.04, 0.07,
       0.01, 0.03, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.005, 0.005, 0.005},
      {0.03, 0.08, 0.09, 0.10, 0.02, 0.03, 0.02, 0.02, 0.005, 0.005, 0.005, 0.01,
       0.10, 0.02, 0.02, 0.03, 0.06, 0.05, 0.02, 0.04, 0.09, 0.07, 0.08});
}

void SynthConfig::validate() const {
  if (n_groups < 2) throw ConfigError("synth: n_groups must be >= 2");
  if (!students_per_group.empty() && students_per_group.size() != n_groups)
    throw ConfigError("synth: students_per_group needs one entry per group");
  for (auto s : students()) if (s < 1) throw ConfigError("synth: every group needs >= 1 student");
  if (tasks_per_group < 1) throw ConfigError("synth: tasks_per_group must be >= 1");
  if (total_tasks < n_groups) throw ConfigError("synth: total_tasks must be >= n_groups");
  if (total_tasks > n_groups * tasks_per_group)
    throw ConfigError("synth: total_tasks exceeds n_groups * tasks_per_group");
  double sum = 0.0;
  for (double p : label_proportions) {
    if (!(p >= 0.0)) throw ConfigError("synth: label_proportions must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("synth: label_proportions must sum to 1");
  const auto quota = apportion(total_tasks, label_proportions);
  const auto& scheme = OrdinalLabelScheme::standard();
  for (std::size_t c = 0; c < kNumClasses; ++c)
    if (quota[c] == 0)
      throw ConfigError("synth: infeasible config, class '" + scheme.name(c) +
                        "' would receive no tasks");
  if (!b2_prototypes.empty()) check_prototypes(b2_prototypes, kB2Codes, "b2_prototypes");
  if (!c_prototypes.empty()) check_prototypes(c_prototypes, kCCodes, "c_prototypes");
  if (!(concentration > 0.0)) throw ConfigError("synth: concentration must be > 0");
  if (!(coder_concentration > 0.0)) throw ConfigError("synth: coder_concentration must be > 0");
  if (!(coder_agreement >= 0.0 && coder_agreement <= 1.0))
    throw ConfigError("synth: coder_agreement must lie in [0, 1]");
  if (!(min_duration_s >= 1.0 && max_duration_s >= min_duration_s))
    throw ConfigError("synth: need 1 <= min_duration_s <= max_duration_s");
}

std::vector<std::size_t> SynthConfig::students() const {
  if (!students_per_group.empty()) return students_per_group;
  std::vector<std::size_t> out(n_groups, 4);
  if (n_groups == 15) {
    out[13] = 3;
    out[14] = 5;
  }
  return out;
}

std::vector<std::size_t> SynthConfig::tasks_per_group_counts() const {
  std::vector<std::size_t> out(n_groups, total_tasks / n_groups);
  for (std::size_t g = 0; g < total_tasks % n_groups; ++g) ++out[g];
  return out;
}

SynthCorpus generate_corpus(const SynthConfig& cfg) {
  cfg.validate();
  const auto b2_protos = cfg.b2_prototypes.empty() ? default_b2_prototypes() : cfg.b2_prototypes;
  const auto c_protos = cfg.c_prototypes.empty() ? default_c_prototypes() : cfg.c_prototypes;
  const auto students = cfg.students();
  const auto task_counts = cfg.tasks_per_group_counts();
  Rng rng = make_stream(cfg.seed, {0x5e7a});

  // Exact class quotas, randomly assigned to tasks.
  const auto quota = apportion(cfg.total_tasks, cfg.label_proportions);
  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < kNumClasses; ++c) labels.insert(labels.end(), quota[c], c);
  std::shuffle(labels.begin(), labels.end(), rng);

  const std::array<std::string, 3> coders{"A1", "A2", "A3"};
  const long min_ds = std::lround(cfg.min_duration_s * 10.0);
  const long max_ds = std::lround(cfg.max_duration_s * 10.0);

  SynthCorpus out;
  std::size_t next_label = 0;
  for (std::size_t g = 0; g < cfg.n_groups; ++g) {
    const auto group = padded("G", g + 1);
    for (std::size_t t = 0; t < task_counts[g]; ++t) {
      const std::size_t label = labels[next_label++];
      TaskRecording task;
      task.group_id = group;
      task.task_id = padded("T", t + 1);
      task.modality = cfg.modality;
      const long duration_ds = std::uniform_int_distribution<long>(min_ds, max_ds)(rng);
      task.duration = ds_to_seconds(duration_ds);

      const auto q_b2 = dirichlet(b2_protos[label], cfg.concentration, rng);
      const auto q_c = dirichlet(c_protos[label], cfg.concentration, rng);

      // B2: one-minute tiles per student; each coder's code multiset follows
      // its own jittered copy of the task distribution.
      const long minutes = (duration_ds + 599) / 600;
      const std::size_t slots = students[g] * static_cast<std::size_t>(minutes);
      for (const auto& coder : coders) {
        const auto q_coder = dirichlet(q_b2, cfg.coder_concentration, rng);
        const auto counts = apportion(slots, q_coder);
        std::vector<std::size_t> codes;
        for (std::size_t k = 0; k < counts.size(); ++k) codes.insert(codes.end(), counts[k], k);
        std::shuffle(codes.begin(), codes.end(), rng);
        std::size_t slot = 0;
        for (std::size_t s = 0; s < students[g]; ++s) {
          for (long m = 0; m < minutes; ++m) {
            Segment seg;
            seg.coder_id = coder;
            seg.student_id = padded("S", s + 1);
            seg.level = Level::B2;
            seg.code = codes[slot++];
            seg.start = ds_to_seconds(m * 600);
            seg.end = ds_to_seconds(std::min(duration_ds, (m + 1) * 600));
            task.b2_segments.push_back(std::move(seg));
          }
        }
      }

      // C: variable 1-30 s segments from one coder, codes drawn per segment.
      for (std::size_t s = 0; s < students[g]; ++s) {
        long cursor = 0;
        while (cursor < duration_ds) {
          const long length = std::uniform_int_distribution<long>(10, 300)(rng);
          Segment seg;
          seg.coder_id = coders[0];
          seg.student_id = padded("S", s + 1);
          seg.level = Level::C;
          seg.code = draw_categorical(q_c, rng);
          seg.start = ds_to_seconds(cursor);
          cursor = std::min(duration_ds, cursor + length);
          seg.end = ds_to_seconds(cursor);
          task.c_segments.push_back(std::move(seg));
        }
      }

      for (const auto& coder : coders) {
        std::size_t reported = label;
        if (uniform01(rng) >= cfg.coder_agreement) {
          std::vector<std::size_t> neighbours;
          if (label > 0) neighbours.push_back(label - 1);
          if (label + 1 < kNumClasses) neighbours.push_back(label + 1);
          reported = neighbours[uniform_index(rng, neighbours.size())];
        }
        task.level_a_codes[coder] = reported;
      }
      out.truth.push_back(TruthRow{task.group_id, task.task_id, label});
      out.tasks.push_back(std::move(task));
    }
  }
  return out;
}

void write_synth_corpus(const std::filesystem::path& dir, const SynthCorpus& corpus) {
  write_corpus(dir, corpus.tasks);
  std::ofstream out(dir / "truth.csv");
  if (!out) throw Error("cannot write " + (dir / "truth.csv").string());
  const auto& scheme = OrdinalLabelScheme::standard();
  csv::write_row(out, {"group_id", "task_id", "true_label"});
  for (const auto& row : corpus.truth)
    csv::write_row(out, {row.group_id, row.task_id, scheme.name(row.true_label)});
}

std::vector<TruthRow> read_truth_csv(const std::filesystem::path& path) {
  auto table = csv::Table::read(path);
  const auto g = table.column("group_id");
  const auto t = table.column("task_id");
  const auto l = table.column("true_label");
  std::vector<TruthRow> out;
  for (const auto& row : table.rows())
    out.push_back(TruthRow{row.fields[g], row.fields[t],
                           OrdinalLabelScheme::standard().index_of(row.fields[l])});
  return out;
}

namespace {

void reject_unknown_synth(const nlohmann::json& j) {
  static const std::vector<std::string> allowed{
      "n_groups",       "students_per_group", "tasks_per_group",     "total_tasks",
      "label_proportions", "b2_prototypes",   "c_prototypes",        "concentration",
      "coder_concentration", "coder_agreement", "min_duration_s",    "max_duration_s",
      "modality",       "seed"};
  if (!j.is_object()) throw ConfigError("synth config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in synth config");
}

}  // namespace

SynthConfig synth_config_from_json(const nlohmann::json& j) {
  reject_unknown_synth(j);
  SynthConfig cfg;
  try {
    cfg.n_groups = j.value("n_groups", cfg.n_groups);
    cfg.students_per_group = j.value("students_per_group", cfg.students_per_group);
    cfg.tasks_per_group = j.value("tasks_per_group", cfg.tasks_per_group);
    cfg.total_tasks = j.value("total_tasks", cfg.total_tasks);
    if (j.contains("label_proportions")) {
      const auto p = j.at("label_proportions").get<std::vector<double>>();
      if (p.size() != kNumClasses) throw ConfigError("synth: label_proportions needs 5 entries");
      std::copy(p.begin(), p.end(), cfg.label_proportions.begin());
    }
    cfg.b2_prototypes = j.value("b2_prototypes", cfg.b2_prototypes);
    cfg.c_prototypes = j.value("c_prototypes", cfg.c_prototypes);
    cfg.concentration = j.value("concentration", cfg.concentration);
    cfg.coder_concentration = j.value("coder_concentration", cfg.coder_concentration);
    cfg.coder_agreement = j.value("coder_agreement", cfg.coder_agreement);
    cfg.min_duration_s = j.value("min_duration_s", cfg.min_duration_s);
    cfg.max_duration_s = j.value("max_duration_s", cfg.max_duration_s);
    if (j.contains("modality")) cfg.modality = parse_modality(j.at("modality").get<std::string>());
    cfg.seed = j.value("seed", cfg.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid synth config: ") + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const SynthConfig& cfg) {
  return {{"n_groups", cfg.n_groups},
          {"students_per_group", cfg.students()},
          {"tasks_per_group", cfg.tasks_per_group},
          {"total_tasks", cfg.total_tasks},
          {"label_proportions", cfg.label_proportions},
          {"b2_prototypes", cfg.b2_prototypes.empty() ? default_b2_prototypes() : cfg.b2_prototypes},
          {"c_prototypes", cfg.c_prototypes.empty() ? default_c_prototypes() : cfg.c_prototypes},
          {"concentration", cfg.concentration},
          {"coder_concentration", cfg.coder_concentration},
          {"coder_agreement", cfg.coder_agreement},
          {"min_duration_s", cfg.min_duration_s},
          {"max_duration_s", cfg.max_duration_s},
          {"modality", std::string(to_string(cfg.modality))},
          {"seed", cfg.seed}};
}

std::size_t nearest_prototype(std::span<const double> features,
                              const std::vector<std::vector<double>>& prototypes) {
  std::size_t best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < prototypes.size(); ++c) {
    double d = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) d += std::abs(features[i] - prototypes[c][i]);
    if (d < best_distance) {
      best_distance = d;
      best = c;
    }
  }
  return best;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return 0.5 * d;
}

}  // namespace ordcollab
