#include <fstream>

#include "csv.hpp"
#include "ordcollab/corpus.hpp"
#include "ordcollab/error.hpp"

namespace ordcollab {

void write_dataset_csv(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  const auto dim = dataset.dimension();
  std::vector<std::string> header{"id", "group_id", "task_id", "coder_id", "synthetic"};
  for (std::size_t i = 0; i < dim; ++i) header.push_back("x" + std::to_string(i));
  for (std::size_t i = 0; i < kNumClasses; ++i) header.push_back("y" + std::to_string(i));
  csv::write_row(out, header);
  for (const auto& s : dataset.samples) {
    if (s.features.size() != dim) throw DataError("sample feature dimension mismatch");
    std::vector<std::string> row{std::to_string(s.id), s.group_id, s.task_id, s.coder_id,
                                 s.synthetic ? "1" : "0"};
    for (double v : s.features) row.push_back(csv::format_double(v));
    for (double v : s.label) row.push_back(csv::format_double(v));
    csv::write_row(out, row);
  }
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  auto table = csv::Table::read(path);
  const auto& header = table.header();
  const std::size_t fixed = 5;
  if (header.size() < fixed + kNumClasses)
    throw ParseError(path.string() + ": too few columns for a dataset file");
  const std::size_t dim = header.size() - fixed - kNumClasses;
  Dataset ds;
  if (dim == kB2Codes) ds.feature_kind = FeatureKind::B2;
  else if (dim == kCCodes) ds.feature_kind = FeatureKind::C;
  else if (dim == kB2Codes + kCCodes) ds.feature_kind = FeatureKind::B2plusC;
  else throw ParseError(path.string() + ": unsupported feature dimension " + std::to_string(dim));

  const auto c_id = table.column("id");
  const auto c_group = table.column("group_id");
  const auto c_task = table.column("task_id");
  const auto c_coder = table.column("coder_id");
  const auto c_syn = table.column("synthetic");
  const auto x0 = table.column("x0");
  const auto y0 = table.column("y0");
  for (const auto& row : table.rows()) {
    const auto where = path.string() + " line " + std::to_string(row.line);
    FeatureSample s;
    s.id = static_cast<std::size_t>(csv::parse_double(row.fields[c_id], where));
    s.group_id = row.fields[c_group];
    s.task_id = row.fields[c_task];
    s.coder_id = row.fields[c_coder];
    s.synthetic = row.fields[c_syn] == "1";
    for (std::size_t i = 0; i < dim; ++i)
      s.features.push_back(csv::parse_double(row.fields[x0 + i], where));
    for (std::size_t i = 0; i < kNumClasses; ++i)
      s.label[i] = csv::parse_double(row.fields[y0 + i], where);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace ordcollab
