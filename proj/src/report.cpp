#include <cstdio>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "ordcollab/error.hpp"
#include "ordcollab/experiment.hpp"

namespace ordcollab {

namespace {

nlohmann::json to_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

nlohmann::json matrix_json(const ConfusionCounts& counts) {
  auto rows = nlohmann::json::array();
  for (const auto& row : counts) rows.push_back(row);
  return rows;
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

const char* kAbbrev[kNumClasses] = {"Eff", "Sat", "Prog", "NI", "WI"};

}  // namespace

nlohmann::json to_json(const EvalReport& report) {
  const auto& scheme = OrdinalLabelScheme::standard();
  nlohmann::json doc;
  doc["tool"] = "ordcollab";
  doc["version"] = report.version;
  doc["seed"] = report.seed;
  doc["config"] = report.config;
  doc["pinned_groups"] = report.pinned_groups;
  doc["dataset"] = {{"samples", report.dataset_size}, {"class_counts", report.class_counts}};

  auto folds = nlohmann::json::array();
  for (std::size_t i = 0; i < report.folds.size(); ++i) {
    const auto& f = report.folds[i];
    auto per_class = nlohmann::json::array();
    for (const auto& m : f.metrics.per_class)
      per_class.push_back({{"precision", m.precision},
                           {"recall", m.recall},
                           {"f1", m.f1},
                           {"support", m.support},
                           {"precision_undefined", m.precision_undefined},
                           {"recall_undefined", m.recall_undefined}});
    folds.push_back({{"fold", i + 1},
                     {"held_out_group", f.held_out_group},
                     {"n_train", f.n_train},
                     {"n_train_used", f.n_train_used},
                     {"n_test", f.n_test},
                     {"precision", f.metrics.precision},
                     {"recall", f.metrics.recall},
                     {"f1", f.metrics.f1},
                     {"accuracy", f.accuracy},
                     {"best_epoch", f.best_epoch + 1},
                     {"best_test_loss", f.best_test_loss},
                     {"final_learning_rate", f.final_learning_rate},
                     {"per_class", per_class},
                     {"confusion", matrix_json(f.confusion)}});
  }
  doc["folds"] = std::move(folds);
  doc["summary"] = {{"precision", to_json(report.precision)},
                    {"recall", to_json(report.recall)},
                    {"f1", to_json(report.f1)}};

  auto percent = nlohmann::json::array();
  for (const auto& row : report.confusion.percent) percent.push_back(row);
  std::vector<std::string> names;
  for (std::size_t c = 0; c < kNumClasses; ++c) names.push_back(scheme.name(c));
  doc["aggregate_confusion"] = {{"labels", names},
                                {"counts", matrix_json(report.confusion.counts)},
                                {"percent", percent},
                                {"zero_support_rows", report.confusion.zero_support},
                                {"diagonal_mass", report.confusion.diagonal_mass()}};
  return doc;
}

std::string metrics_csv(const EvalReport& report) {
  std::ostringstream out;
  csv::write_row(out, {"fold", "held_out_group", "n_test", "precision", "recall", "f1"});
  for (std::size_t i = 0; i < report.folds.size(); ++i) {
    const auto& f = report.folds[i];
    csv::write_row(out, {std::to_string(i + 1), f.held_out_group, std::to_string(f.n_test),
                         csv::format_double(f.metrics.precision),
                         csv::format_double(f.metrics.recall), csv::format_double(f.metrics.f1)});
  }
  return out.str();
}

std::string render_confusion(const nlohmann::json& report) {
  try {
    const auto& agg = report.at("aggregate_confusion");
    const auto& labels = agg.at("labels");
    const auto& percent = agg.at("percent");
    const auto& zero = agg.at("zero_support_rows");
    std::ostringstream out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-24s", "true \\ predicted");
    out << buf;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      std::snprintf(buf, sizeof buf, "%9s", kAbbrev[c]);
      out << buf;
    }
    out << '\n';
    for (std::size_t r = 0; r < kNumClasses; ++r) {
      std::snprintf(buf, sizeof buf, "%-24s", labels.at(r).get<std::string>().c_str());
      out << buf;
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        std::snprintf(buf, sizeof buf, "%9s", fixed(percent.at(r).at(c).get<double>(), 2).c_str());
        out << buf;
      }
      if (zero.at(r).get<bool>()) out << "  (no test samples)";
      out << '\n';
    }
    return out.str();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report is missing aggregate_confusion: ") + e.what());
  }
}

std::string render_report(const nlohmann::json& report) {
  try {
    std::ostringstream out;
    const auto& cfg = report.at("config");
    out << report.at("version").get<std::string>() << "  seed " << report.at("seed").dump()
        << '\n';
    out << "features " << cfg.value("features", "?") << "  mapping " << cfg.value("mapping", "?")
        << "  modality " << cfg.value("modality", "?") << "  model " << cfg.value("model", "?")
        << "  loss " << cfg.value("loss", "?")
        << "  balancing " << (cfg.value("class_balancing", false) ? "on" : "off");
    if (cfg.contains("mixup") && !cfg.at("mixup").is_null()) {
      const auto& m = cfg.at("mixup");
      out << "  mixup " << m.value("mode", "?") << " tau=" << m.at("tau").dump()
          << " n=" << m.at("n_per_class").dump();
    } else {
      out << "  mixup off";
    }
    out << "\n\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-5s %-16s %6s %10s %10s %10s\n", "fold", "held-out", "n",
                  "precision", "recall", "f1");
    out << buf;
    for (const auto& f : report.at("folds")) {
      std::snprintf(buf, sizeof buf, "%-5s %-16s %6s %10.4f %10.4f %10.4f\n",
                    f.at("fold").dump().c_str(), f.at("held_out_group").get<std::string>().c_str(),
                    f.at("n_test").dump().c_str(), f.at("precision").get<double>(),
                    f.at("recall").get<double>(), f.at("f1").get<double>());
      out << buf;
    }
    const auto& s = report.at("summary");
    auto line = [&](const char* name) {
      std::snprintf(buf, sizeof buf, "%-9s %.4f +/- %.4f\n", name,
                    s.at(name).at("mean").get<double>(), s.at(name).at("std").get<double>());
      out << buf;
    };
    out << '\n';
    line("precision");
    line("recall");
    line("f1");
    out << "\nAggregate confusion matrix (row-normalized %)\n" << render_confusion(report);
    return out.str();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

void write_report(const std::filesystem::path& dir, const EvalReport& report) {
  std::filesystem::create_directories(dir);
  const auto doc = to_json(report);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw Error("cannot write " + (dir / "report.json").string());
    out << doc.dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "metrics.csv");
    out << metrics_csv(report);
  }
  {
    std::ofstream out(dir / "confusion.txt");
    out << render_confusion(doc);
  }
}

}  // namespace ordcollab
