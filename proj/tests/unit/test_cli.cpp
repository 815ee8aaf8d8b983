#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "ordcollab/cli.hpp"
#include "ordcollab/synth.hpp"
#include "test_util.hpp"

using namespace ordcollab;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ordcollab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

/// Corpus plus a small, fast experiment config.
struct Workspace {
  test::TempDir dir;
  std::string corpus = (dir / "corpus").string();
  std::string config = (dir / "config.json").string();

  Workspace() {
    auto r = run({"synth", "-o", corpus, "--seed", "4"});
    REQUIRE(r.code == 0);
    test::write_file(config, R"({
      "corpus": ")" + corpus + R"(",
      "features": "B2", "mapping": "B2toA", "loss": "OCE",
      "train": {"epochs": 2},
      "network": {"hidden_width": 8},
      "seed": 7
    })");
  }
};

}  // namespace

TEST_CASE("cli: eval writes the report files") {
  Workspace ws;
  const auto out = (ws.dir / "eval").string();
  auto r = run({"eval", "-c", ws.config, "-o", out});
  INFO(r.err);
  CHECK(r.code == 0);
  for (const char* name : {"report.json", "metrics.csv", "confusion.txt"})
    CHECK(std::filesystem::exists(std::filesystem::path(out) / name));
  CHECK(r.out.find("f1") != std::string::npos);

  auto again = run({"eval", "-c", ws.config, "-o", (ws.dir / "eval2").string(), "-j", "3"});
  CHECK(again.code == 0);
  CHECK(test::read_file(std::filesystem::path(out) / "report.json") ==
        test::read_file(ws.dir / "eval2" / "report.json"));

  auto rendered = run({"report", (std::filesystem::path(out) / "report.json").string()});
  CHECK(rendered.code == 0);
  CHECK(rendered.out.find("Aggregate confusion matrix") != std::string::npos);
}

TEST_CASE("cli: validation errors exit 1 with a message") {
  Workspace ws;
  auto r = run({"eval", "-c", ws.config, "-o", (ws.dir / "x").string(), "--tau", "1.2"});
  CHECK(r.code == 1);
  CHECK(r.err.find("tau must lie in [0, 1)") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(ws.dir / "x"));

  test::write_file(ws.dir / "bad.json", R"({"corpus": "x", "mixup": {"tau": 1.2}})");
  r = run({"eval", "-c", (ws.dir / "bad.json").string(), "-o", (ws.dir / "y").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("[0, 1)") != std::string::npos);

  test::write_file(ws.dir / "unknown.json", R"({"corpus": "x", "learning_rat": 0.1})");
  r = run({"eval", "-c", (ws.dir / "unknown.json").string(), "-o", (ws.dir / "y").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("unknown key 'learning_rat'") != std::string::npos);

  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"eval", "-c", ws.config, "--epochs", "many"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cli: runtime failures exit 2 with context") {
  Workspace ws;
  auto r = run({"eval", "-c", ws.config, "-o", (ws.dir / "x").string(), "--corpus",
                (ws.dir / "missing").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("missing") != std::string::npos);

  // Pinning every group leaves no fold to evaluate.
  test::TempDir lone;
  SynthConfig sc;
  sc.n_groups = 3;
  sc.total_tasks = 6;
  sc.tasks_per_group = 2;
  sc.label_proportions = {0.2, 0.2, 0.2, 0.2, 0.2};
  sc.seed = 1;
  auto corpus = generate_corpus(sc);
  write_synth_corpus(lone.path(), corpus);
  r = run({"eval", "--corpus", lone.path().string(), "-o", (ws.dir / "z").string(), "--pin",
           "G01", "--pin", "G02", "--pin", "G03", "--epochs", "1", "--hidden-width", "4"});
  CHECK(r.code == 2);
}

TEST_CASE("cli: sweep writes one report per cell, each identical to a single eval") {
  Workspace ws;
  const auto out = ws.dir / "sweep";
  auto r = run({"sweep", "-c", ws.config, "-o", out.string(), "--taus", "0.55,0.75,0.95", "--ns",
                "200,500,1000", "-j", "2"});
  INFO(r.err);
  REQUIRE(r.code == 0);
  std::size_t reports = 0;
  for (const auto& entry : std::filesystem::directory_iterator(out))
    reports += std::filesystem::exists(entry.path() / "report.json");
  CHECK(reports == 9);
  const auto summary = test::read_file(out / "summary.csv");
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 10);

  const auto cell = out / "tau0.75_n500_OCE_nobal";
  REQUIRE(std::filesystem::exists(cell / "report.json"));
  const auto single = ws.dir / "single";
  r = run({"eval", "-c", ws.config, "-o", single.string(), "--tau", "0.75", "--n", "500"});
  REQUIRE(r.code == 0);
  CHECK(test::read_file(cell / "report.json") == test::read_file(single / "report.json"));
}

TEST_CASE("cli: seed precedence flag > config > environment") {
  Workspace ws;
  auto seed_of = [&](const std::string& dir) {
    return nlohmann::json::parse(test::read_file(ws.dir / dir / "report.json")).at("seed");
  };
  test::write_file(ws.dir / "noseed.json",
                   R"({"corpus": ")" + ws.corpus + R"(", "model": "majority"})");
  ::setenv("ORDCOLLAB_SEED", "31", 1);
  CHECK(run({"eval", "-c", (ws.dir / "noseed.json").string(), "-o", (ws.dir / "a").string()}).code == 0);
  CHECK(seed_of("a") == 31);
  CHECK(run({"eval", "-c", ws.config, "-o", (ws.dir / "b").string(), "--model", "majority"}).code == 0);
  CHECK(seed_of("b") == 7);
  CHECK(run({"eval", "-c", ws.config, "-o", (ws.dir / "c").string(), "--model", "majority",
             "--seed", "5"}).code == 0);
  CHECK(seed_of("c") == 5);
  ::unsetenv("ORDCOLLAB_SEED");
}

TEST_CASE("cli: featurize and train") {
  Workspace ws;
  const auto csv = ws.dir / "ds.csv";
  auto r = run({"featurize", "-c", ws.config, "-o", csv.string()});
  CHECK(r.code == 0);
  CHECK(read_dataset_csv(csv).size() == 351);

  const auto snap = ws.dir / "model" / "fold.json";
  r = run({"train", "-c", ws.config, "--fold", "G03", "-o", snap.string()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(test::read_file(snap));
  CHECK(doc.at("format") == "ordcollab.mlp");
  CHECK(doc.at("metadata").at("held_out_group") == "G03");
  CHECK(doc.at("layer_dims") == std::vector<int>{7, 8, 8, 8, 5});

  CHECK(run({"train", "-c", ws.config, "--fold", "G99", "-o", snap.string()}).code == 1);
}
