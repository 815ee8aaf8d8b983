#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "ordcollab/error.hpp"
#include "ordcollab/synth.hpp"
#include "test_util.hpp"

using namespace ordcollab;

namespace {

double prototype_accuracy(const SynthCorpus& corpus) {
  const auto protos = default_b2_prototypes();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < corpus.tasks.size(); ++i)
    hits += nearest_prototype(b2_histogram_pooled(corpus.tasks[i]), protos) ==
            corpus.truth[i].true_label;
  return static_cast<double>(hits) / static_cast<double>(corpus.tasks.size());
}

}  // namespace

TEST_CASE("default corpus structure") {
  const auto corpus = generate_corpus(SynthConfig{});
  CHECK(corpus.tasks.size() == 117);
  CHECK(corpus.truth.size() == 117);
  std::map<std::string, std::set<std::string>> students;
  std::map<std::string, std::size_t> tasks;
  for (const auto& t : corpus.tasks) {
    ++tasks[t.group_id];
    for (const auto& s : t.b2_segments) students[t.group_id].insert(s.student_id);
    CHECK(t.level_a_codes.size() == 3);
    CHECK(t.b2_coders().size() == 3);
    CHECK(t.duration >= 300.0);
    CHECK(t.duration <= 900.0);
    validate_task(t);
  }
  REQUIRE(students.size() == 15);
  CHECK(students["G14"].size() == 3);
  CHECK(students["G15"].size() == 5);
  CHECK(students["G01"].size() == 4);
  for (const auto& [group, n] : tasks) CHECK((n == 7 || n == 8));

  const auto ds = build_dataset(corpus.tasks, FeatureKind::B2, Mapping::B2toA);
  CHECK(ds.size() == 351);
  CHECK(build_dataset(corpus.tasks, FeatureKind::C, Mapping::CtoA).size() == 117);
}

TEST_CASE("label proportions within 5 percentage points") {
  SynthConfig cfg;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    cfg.seed = seed;
    const auto corpus = generate_corpus(cfg);
    std::array<double, kNumClasses> truth{}, adjudicated{};
    for (std::size_t i = 0; i < corpus.tasks.size(); ++i) {
      truth[corpus.truth[i].true_label] += 1.0 / 117;
      adjudicated[adjudicated_label(corpus.tasks[i])] += 1.0 / 117;
    }
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      CHECK(std::abs(truth[c] - cfg.label_proportions[c]) <= 0.05);
      CHECK(std::abs(adjudicated[c] - cfg.label_proportions[c]) <= 0.05);
    }
  }
}

TEST_CASE("noise-free limit: nearest prototype is always right") {
  SynthConfig cfg;
  cfg.concentration = 1e9;
  cfg.coder_concentration = 1e9;
  cfg.coder_agreement = 1.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    cfg.seed = seed;
    CHECK(prototype_accuracy(generate_corpus(cfg)) == 1.0);
  }
}

TEST_CASE("nearest-prototype accuracy does not decrease with concentration") {
  double previous = 0.0;
  for (double kappa : {2.0, 10.0, 50.0, 250.0, 1e4}) {
    SynthConfig cfg;
    cfg.concentration = kappa;
    double total = 0;
    const int seeds = 5;
    for (int seed = 0; seed < seeds; ++seed) {
      cfg.seed = static_cast<std::uint64_t>(seed);
      total += prototype_accuracy(generate_corpus(cfg));
    }
    const double mean = total / seeds;
    INFO("kappa " << kappa << " mean accuracy " << mean);
    CHECK(mean >= previous);
    previous = mean;
  }
}

TEST_CASE("prototype distance grows with ordinal distance") {
  for (const auto& protos : {default_b2_prototypes(), default_c_prototypes()}) {
    for (std::size_t a = 0; a < kNumClasses; ++a)
      for (std::size_t b = a + 1; b + 1 < kNumClasses; ++b)
        CHECK(total_variation(protos[a], protos[b]) < total_variation(protos[a], protos[b + 1]));
  }
}

TEST_CASE("generate, write, parse round trip; same seed same files") {
  SynthConfig cfg;
  cfg.seed = 9;
  const auto corpus = generate_corpus(cfg);
  test::TempDir a, b;
  write_synth_corpus(a.path(), corpus);
  write_synth_corpus(b.path(), generate_corpus(cfg));
  for (const char* f : {"segments.csv", "adjudication.csv", "truth.csv"})
    CHECK(test::read_file(a / f) == test::read_file(b / f));

  const auto parsed = parse_corpus(a.path());
  REQUIRE(parsed.size() == corpus.tasks.size());
  // parse_corpus orders tasks by (group, task); generation already does.
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const auto& x = parsed[i];
    const auto& y = corpus.tasks[i];
    CHECK(x.group_id == y.group_id);
    CHECK(x.task_id == y.task_id);
    CHECK(x.duration == y.duration);
    CHECK(x.level_a_codes == y.level_a_codes);
    REQUIRE(x.b2_segments.size() == y.b2_segments.size());
    REQUIRE(x.c_segments.size() == y.c_segments.size());
    for (std::size_t k = 0; k < x.c_segments.size(); ++k) {
      CHECK(x.c_segments[k].code == y.c_segments[k].code);
      CHECK(x.c_segments[k].start == y.c_segments[k].start);
      CHECK(x.c_segments[k].end == y.c_segments[k].end);
    }
    CHECK(c_histogram(x) == c_histogram(y));
    CHECK(b2_histogram(x, "A2") == b2_histogram(y, "A2"));
  }
  const auto truth = read_truth_csv(a / "truth.csv");
  REQUIRE(truth.size() == corpus.truth.size());
  CHECK(truth[5].true_label == corpus.truth[5].true_label);

  cfg.seed = 10;
  test::TempDir c;
  write_synth_corpus(c.path(), generate_corpus(cfg));
  CHECK(test::read_file(a / "segments.csv") != test::read_file(c / "segments.csv"));
}

TEST_CASE("synth config validation") {
  SynthConfig cfg;
  cfg.label_proportions = {0.0, 0.3, 0.4, 0.2, 0.1};
  test::check_throws_containing<ConfigError>([&] { generate_corpus(cfg); }, "infeasible");
  CHECK_THROWS_AS(synth_config_from_json({{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(synth_config_from_json({{"concentration", -1.0}}), ConfigError);
  const auto j = to_json(SynthConfig{});
  CHECK(to_json(synth_config_from_json(j)) == j);
}
