// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only N[,N...]] [--seeds K] [--epochs E] [--jobs J]
//
// Defaults run every criterion with 5 seeds and 150 epochs for the trend
// checks, using all hardware threads for fold-parallel training.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "ordcollab/cli.hpp"
#include "ordcollab/experiment.hpp"
#include "ordcollab/synth.hpp"

using namespace ordcollab;

namespace {

struct Options {
  std::set<int> only;
  std::size_t seeds = 5;
  std::size_t epochs = 150;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  double total = 0;
  for (auto& x : v) total += x = -std::log(1.0 - uniform01(rng));
  for (auto& x : v) x /= total;
  return v;
}

const Dataset& default_dataset() {
  static const Dataset ds = [] {
    const auto corpus = generate_corpus(SynthConfig{});
    return build_dataset(corpus.tasks, FeatureKind::B2, Mapping::B2toA);
  }();
  return ds;
}

// --------------------------------------------------------------------------

Outcome parameter_counts() {
  const std::pair<std::size_t, std::size_t> cases[] = {{7, 507505}, {23, 515505}, {30, 519005}};
  Outcome o{true, ""};
  for (auto [dim, expected] : cases) {
    MlpShape shape;
    shape.input_dim = dim;
    const auto n = Mlp<float>(shape).parameter_count();
    o.pass = o.pass && n == expected && parameter_count(shape) == expected;
    o.detail += std::to_string(dim) + "->" + std::to_string(n) + " ";
  }
  return o;
}

Outcome gradient_check() {
  MlpShape shape;
  shape.hidden_width = 8;
  shape.dropout.assign(shape.hidden_layers + 1, 0.0);
  using Mat = Mlp<double>::Matrix;
  double worst = 0;
  std::size_t instances = 0;
  for (LossKind kind : {LossKind::CE, LossKind::OCE}) {
    for (std::uint64_t i = 0; i < 25; ++i, ++instances) {
      Rng rng = make_stream(2024, {static_cast<std::uint64_t>(kind), i});
      auto model = Mlp<double>::glorot(shape, rng);
      for (auto& l : model.layers())
        for (Eigen::Index k = 0; k < l.bias.size(); ++k) l.bias(k) = 0.2 * (uniform01(rng) - 0.5);
      Mat x(1, 7), y(1, 5);
      const auto xv = random_simplex(rng, 7);
      for (Eigen::Index c = 0; c < 7; ++c) x(0, c) = xv[static_cast<std::size_t>(c)];
      y.setZero();
      y(0, static_cast<Eigen::Index>(uniform_index(rng, 5))) = 1.0;

      const auto pass = model.forward(x, nullptr);
      Mat dlogits;
      batch_loss<double>(kind, pass.probabilities, y, {}, &dlogits);
      const auto grads = model.backward(pass, dlogits);
      auto loss_at = [&] { return batch_loss<double>(kind, model.predict(x), y, {}, nullptr); };
      double diff2 = 0, num2 = 0, ana2 = 0;
      const double h = 1e-6;
      for (std::size_t l = 0; l < model.layers().size(); ++l) {
        auto visit = [&](auto& param, const auto& grad) {
          for (Eigen::Index k = 0; k < param.size(); ++k) {
            const double keep = param.data()[k];
            param.data()[k] = keep + h;
            const double up = loss_at();
            param.data()[k] = keep - h;
            const double down = loss_at();
            param.data()[k] = keep;
            const double numeric = (up - down) / (2 * h);
            const double analytic = grad.data()[k];
            diff2 += (numeric - analytic) * (numeric - analytic);
            num2 += numeric * numeric;
            ana2 += analytic * analytic;
          }
        };
        visit(model.layers()[l].weights, grads[l].weights);
        visit(model.layers()[l].bias, grads[l].bias);
      }
      worst = std::max(worst, std::sqrt(diff2) / std::max(std::sqrt(num2), std::sqrt(ana2)));
    }
  }
  return {worst < 1e-4, std::to_string(instances) + " instances (CE+OCE), max relative error " +
                            fmt("%.2e", worst)};
}

Outcome ordinal_loss_suite() {
  Rng rng = make_stream(77, {});
  std::size_t violations = 0;
  double worst_ratio_err = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = random_simplex(rng, 5);
    std::vector<double> y;
    if (i % 2) {
      y = random_simplex(rng, 5);
    } else {
      y.assign(5, 0.0);
      y[uniform_index(rng, 5)] = 1.0;
    }
    const double ce = ce_loss(p, y), oce = oce_loss(p, y);
    const auto ay = argmax(std::span<const double>(y));
    const auto ap = argmax(std::span<const double>(p));
    const double w = std::abs(static_cast<double>(ay) - static_cast<double>(ap));
    if (!(oce >= ce)) ++violations;
    if ((oce == ce) != (ay == ap)) ++violations;
    worst_ratio_err = std::max(worst_ratio_err, std::abs(oce / ce - (1.0 + w)) / (1.0 + w));
  }
  return {violations == 0 && worst_ratio_err <= 1e-12,
          "10000 pairs, violations " + std::to_string(violations) + ", max ratio error " +
              fmt("%.1e", worst_ratio_err)};
}

Outcome mixup_properties() {
  const auto& ds = default_dataset();
  bool ok = true;
  std::ostringstream detail;
  for (double tau : {0.55, 0.75, 0.95}) {
    MixupConfig cfg;
    cfg.tau = tau;
    Rng rng = make_stream(5, {static_cast<std::uint64_t>(tau * 100)});
    MixupTrace trace;
    const auto full = controlled_mixup(ds, cfg, rng, &trace);
    bool lambdas = true, dominated = true;
    for (std::size_t i = 0; i < full.size(); ++i) {
      lambdas = lambdas && trace.lambdas[i] >= tau && trace.lambdas[i] <= 1.0;
      dominated = dominated && full.samples[i].label_index() == trace.primaries[i] &&
                  ds.samples[full.samples[i].primary_parent].label_index() == trace.primaries[i];
    }
    ok = ok && full.size() == 1000 && lambdas && dominated;
    detail << "tau " << tau << ": n=" << full.size() << (lambdas ? "" : " lambda-out-of-range")
           << (dominated ? "" : " argmax-mismatch") << "; ";

    cfg.mode = MixupMode::Limited;
    const auto limited = controlled_mixup(ds, cfg, rng);
    bool superset = limited.size() >= ds.size();
    for (std::size_t i = 0; superset && i < ds.size(); ++i)
      superset = limited.samples[i].features == ds.samples[i].features &&
                 limited.samples[i].label == ds.samples[i].label && !limited.samples[i].synthetic;
    const auto counts = ds.class_counts();
    std::size_t expected = ds.size();
    for (auto c : counts) expected += c >= 200 ? 0 : 200 - c;
    superset = superset && limited.size() == expected;
    ok = ok && superset;
    if (!superset) detail << "limited superset violated; ";
  }
  return {ok, detail.str() + "limited superset holds"};
}

Outcome logo_protocol() {
  const auto& ds = default_dataset();
  const auto pinned = auto_pinned_groups(ds);
  const auto folds = logo_splits(ds, pinned);
  std::vector<std::size_t> tested;
  bool ok = pinned.size() == 1 && folds.size() == 14;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const auto& f = folds[i];
    tested.insert(tested.end(), f.test_ids.begin(), f.test_ids.end());
    for (auto id : f.test_ids) ok = ok && ds.samples[id].group_id == f.held_out_group;
    try {
      const auto train = ds.subset(f.train_ids);
      assert_no_leakage(f, train);
      Rng rng = make_stream(1, {i});
      assert_no_leakage(f, controlled_mixup(train, MixupConfig{}, rng));
    } catch (const std::exception& e) {
      ok = false;
    }
  }
  std::sort(tested.begin(), tested.end());
  const bool disjoint = std::adjacent_find(tested.begin(), tested.end()) == tested.end();
  std::size_t non_pinned = 0;
  for (const auto& s : ds.samples) non_pinned += !pinned.count(s.group_id);
  ok = ok && disjoint && tested.size() == non_pinned;
  return {ok, std::to_string(folds.size()) + " folds, pinned " + *pinned.begin() + ", " +
                  std::to_string(tested.size()) + "/" + std::to_string(non_pinned) +
                  " non-pinned samples tested once, leakage check passed"};
}

Outcome metric_identities() {
  Rng rng = make_stream(99, {});
  std::size_t mismatches = 0;
  std::vector<ConfusionCounts> folds;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 80);
    std::vector<std::size_t> truth(n), pred(n);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = uniform_index(rng, 5);
      pred[i] = uniform_index(rng, 5);
      correct += truth[i] == pred[i];
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(n);
    if (std::abs(weighted_metrics(pred, truth).recall - accuracy) > 1e-12) ++mismatches;
    folds.push_back(confusion_counts(pred, truth));
  }
  double worst_row = 0;
  for (std::size_t k = 0; k < folds.size(); k += 50) {
    const auto agg = aggregate_confusion(std::span(folds).subspan(k, 50));
    for (std::size_t r = 0; r < kNumClasses; ++r) {
      if (agg.zero_support[r]) continue;
      double total = 0;
      for (double v : agg.percent[r]) total += v;
      worst_row = std::max(worst_row, std::abs(total - 100.0));
    }
  }
  return {mismatches == 0 && worst_row <= 1e-6,
          "1000 vectors, recall/accuracy mismatches " + std::to_string(mismatches) +
              ", max |row sum - 100| " + fmt("%.1e", worst_row)};
}

// --------------------------------------------------------------------------
// Trend criteria

struct Arm {
  const char* name;
  LossKind loss;
  bool balancing;
  std::optional<MixupMode> mixup;
};

const Arm kArms[] = {
    {"CE", LossKind::CE, false, std::nullopt},
    {"OCE", LossKind::OCE, false, std::nullopt},
    {"CE+bal", LossKind::CE, true, std::nullopt},
    {"CE+Mixup", LossKind::CE, false, MixupMode::Full},
    {"OCE+Mixup", LossKind::OCE, false, MixupMode::Full},
    {"OCE+Mixup(Limited)", LossKind::OCE, false, MixupMode::Limited},
};
constexpr std::size_t kNumArms = std::size(kArms);

struct ArmResult {
  double precision = 0, f1 = 0, diagonal = 0;
};

struct TrendRuns {
  std::vector<std::array<ArmResult, kNumArms>> by_seed;
  double seconds = 0;
};

const TrendRuns& trend_runs(const Options& opt) {
  static TrendRuns runs;
  static bool done = false;
  if (done) return runs;
  done = true;
  const auto t0 = std::chrono::steady_clock::now();
  const auto& ds = default_dataset();
  for (std::size_t s = 1; s <= opt.seeds; ++s) {
    std::array<ArmResult, kNumArms> row{};
    std::printf("  seed %zu:", s);
    for (std::size_t a = 0; a < kNumArms; ++a) {
      ExperimentConfig cfg;
      cfg.corpus = "<default synthetic corpus>";
      cfg.train.epochs = opt.epochs;
      cfg.train.loss = kArms[a].loss;
      cfg.train.class_balancing = kArms[a].balancing;
      if (kArms[a].mixup) {
        cfg.mixup = MixupConfig{};
        cfg.mixup->mode = *kArms[a].mixup;
      }
      cfg.seed = s;
      cfg.validate();
      const auto report = run_experiment(ds, cfg, RunOptions{opt.jobs});
      row[a] = {report.precision.mean, report.f1.mean, report.confusion.diagonal_mass()};
      std::printf("  %s P=%.3f F1=%.3f diag=%.1f", kArms[a].name, row[a].precision, row[a].f1,
                  row[a].diagonal);
      std::fflush(stdout);
    }
    std::printf("\n");
    runs.by_seed.push_back(row);
  }
  runs.seconds = seconds_since(t0);
  return runs;
}

std::size_t count_seeds(const TrendRuns& runs,
                        const std::function<bool(const std::array<ArmResult, kNumArms>&)>& holds) {
  return static_cast<std::size_t>(std::count_if(runs.by_seed.begin(), runs.by_seed.end(), holds));
}

Outcome trend_reproduction(const Options& opt) {
  const auto& runs = trend_runs(opt);
  const std::size_t n = runs.by_seed.size();
  const std::size_t need = n - n / 5;  // 4 of 5
  const auto a = count_seeds(runs, [](const auto& r) { return r[1].f1 > r[0].f1; });
  const auto b = count_seeds(runs, [](const auto& r) {
    return r[3].precision > r[2].precision && r[4].precision > r[2].precision;
  });
  const auto c = count_seeds(runs, [](const auto& r) { return r[4].diagonal > r[0].diagonal; });
  std::ostringstream d;
  d << "(a) OCE>CE F1 " << a << "/" << n << "; (b) Mixup>CE+bal precision " << b << "/" << n
    << "; (c) OCE+Mixup diag>CE diag " << c << "/" << n << "; need " << need << "; "
    << fmt("%.0f", runs.seconds) << " s with " << opt.jobs << " thread(s), " << opt.epochs
    << " epochs";
  return {a >= need && b >= need && c >= need && n >= 5, d.str()};
}

Outcome full_vs_limited(const Options& opt) {
  const auto& runs = trend_runs(opt);
  double full = 0, limited = 0;
  for (const auto& r : runs.by_seed) {
    full += r[4].f1;
    limited += r[5].f1;
  }
  full /= static_cast<double>(runs.by_seed.size());
  limited /= static_cast<double>(runs.by_seed.size());
  const double gap = std::abs(full - limited);
  return {gap <= 0.05 && runs.by_seed.size() >= 5,
          "mean F1 Full " + fmt("%.4f", full) + " vs Limited " + fmt("%.4f", limited) +
              ", gap " + fmt("%.2f", 100 * gap) + " pp"};
}

// --------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ordcollab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

Outcome determinism(const Options& opt) {
  const auto root = std::filesystem::temp_directory_path() /
                    ("ordcollab_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(root);
  const auto corpus = (root / "corpus").string();
  bool ok = cli({"synth", "-o", corpus, "--seed", "0"}) == 0;
  const std::string jobs = std::to_string(opt.jobs);
  const std::vector<std::string> common = {"--corpus", corpus, "--seed", "11", "--epochs", "10"};

  auto eval = [&](const std::string& name, const std::string& j) {
    std::vector<std::string> args{"eval", "-o", (root / name).string(), "-j", j, "--tau", "0.75"};
    args.insert(args.end(), common.begin(), common.end());
    const auto t0 = std::chrono::steady_clock::now();
    ok = ok && cli(args) == 0;
    return seconds_since(t0);
  };
  const double t1 = eval("eval1", jobs);
  const double t2 = eval("eval2", "1");
  const bool eval_same = slurp(root / "eval1" / "report.json") == slurp(root / "eval2" / "report.json");

  auto sweep = [&](const std::string& name) {
    std::vector<std::string> args{"sweep", "-o", (root / name).string(), "-j", jobs,
                                  "--taus", "0.55,0.95", "--losses", "CE,OCE"};
    args.insert(args.end(), common.begin(), common.end());
    ok = ok && cli(args) == 0;
  };
  sweep("sweep1");
  sweep("sweep2");
  std::size_t cells = 0, same = 0;
  for (const auto& e : std::filesystem::directory_iterator(root / "sweep1")) {
    if (!e.is_directory()) continue;
    ++cells;
    same += slurp(e.path() / "report.json") == slurp(root / "sweep2" / e.path().filename() / "report.json");
  }
  std::filesystem::remove_all(root);
  ok = ok && eval_same && cells == 4 && same == cells && t2 < 2.0 * t1;
  return {ok, std::string("eval repeat ") + (eval_same ? "identical" : "DIFFERENT") +
                  " (runs " + fmt("%.1f", t1) + " s / " + fmt("%.1f", t2) + " s); sweep cells identical " +
                  std::to_string(same) + "/" + std::to_string(cells)};
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "missing value for %s\n", a.c_str());
        std::exit(2);
      }
      return argv[++i];
    };
    if (a == "--only") {
      std::stringstream ss(next());
      std::string tok;
      while (std::getline(ss, tok, ',')) opt.only.insert(std::stoi(tok));
    } else if (a == "--seeds") {
      opt.seeds = std::stoul(next());
    } else if (a == "--epochs") {
      opt.epochs = std::stoul(next());
    } else if (a == "--jobs") {
      opt.jobs = std::stoul(next());
    } else {
      std::fprintf(stderr, "unknown argument %s\n", a.c_str());
      return 2;
    }
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "parameter-count exactness", parameter_counts},
      {2, "gradient correctness", gradient_check},
      {3, "ordinal-loss property suite", ordinal_loss_suite},
      {4, "controlled-Mixup properties", mixup_properties},
      {5, "LOGO protocol", logo_protocol},
      {6, "metric identities", metric_identities},
      {7, "trend reproduction", [&] { return trend_reproduction(opt); }},
      {8, "Full vs Limited Mixup equivalence", [&] { return full_vs_limited(opt); }},
      {9, "determinism", [&] { return determinism(opt); }},
  };

  std::printf("%s, %zu thread(s)\n", version_string().c_str(), opt.jobs);
  int failures = 0;
  for (const auto& c : criteria) {
    if (!opt.only.empty() && !opt.only.count(c.id)) continue;
    if (c.id == 7 || (c.id == 8 && !opt.only.count(7)))
      std::printf("criterion %d runs: %zu seeds x %zu arms, %zu epochs\n", c.id, opt.seeds, kNumArms,
                  opt.epochs);
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] %d. %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%s\n", failures ? "ACCEPTANCE: FAILED" : "ACCEPTANCE: ALL PASSED");
  return failures ? 1 : 0;
}
