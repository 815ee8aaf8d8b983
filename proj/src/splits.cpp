#include "ordcollab/splits.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "ordcollab/error.hpp"

namespace ordcollab {

namespace {

std::array<std::map<std::string, std::size_t>, kNumClasses> holders(const Dataset& dataset) {
  std::array<std::map<std::string, std::size_t>, kNumClasses> out;
  for (const auto& s : dataset.samples) ++out[s.label_index()][s.group_id];
  return out;
}

}  // namespace

std::set<std::string> sole_holder_groups(const Dataset& dataset) {
  std::set<std::string> out;
  for (const auto& by_group : holders(dataset))
    if (by_group.size() == 1) out.insert(by_group.begin()->first);
  return out;
}

std::set<std::string> auto_pinned_groups(const Dataset& dataset) {
  auto sole = sole_holder_groups(dataset);
  if (!sole.empty() || dataset.empty()) return sole;
  const auto counts = dataset.class_counts();
  std::size_t rarest = kNumClasses;
  for (std::size_t c = 0; c < kNumClasses; ++c)
    if (counts[c] > 0 && (rarest == kNumClasses || counts[c] < counts[rarest])) rarest = c;
  const auto by_group = holders(dataset)[rarest];
  auto best = by_group.begin();
  for (auto it = by_group.begin(); it != by_group.end(); ++it)
    if (it->second > best->second) best = it;
  return {best->first};
}

std::vector<FoldSpec> logo_splits(const Dataset& dataset,
                                  const std::set<std::string>& pinned_groups) {
  const auto groups = dataset.groups();
  if (groups.size() < 2) throw DataError("logo_splits: need at least 2 groups");
  for (const auto& g : pinned_groups)
    if (!std::binary_search(groups.begin(), groups.end(), g))
      throw ConfigError("pinned group '" + g + "' does not occur in the dataset");

  const auto& scheme = OrdinalLabelScheme::standard();
  const auto by_class = holders(dataset);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (by_class[c].size() != 1) continue;
    const auto& group = by_class[c].begin()->first;
    if (!pinned_groups.count(group))
      throw DataError("group '" + group + "' holds all samples of class '" + scheme.name(c) +
                      "'; pin it so it stays in every training set");
  }

  std::vector<FoldSpec> folds;
  for (const auto& g : groups) {
    if (pinned_groups.count(g)) continue;
    FoldSpec fold;
    fold.held_out_group = g;
    for (std::size_t i = 0; i < dataset.size(); ++i)
      (dataset.samples[i].group_id == g ? fold.test_ids : fold.train_ids).push_back(i);
    folds.push_back(std::move(fold));
  }
  if (folds.empty()) throw DataError("logo_splits: every group is pinned; no folds remain");
  return folds;
}

void assert_no_leakage(const FoldSpec& fold, const Dataset& train_set) {
  std::unordered_set<std::size_t> test(fold.test_ids.begin(), fold.test_ids.end());
  for (auto id : fold.train_ids)
    if (test.count(id)) throw DataError("leakage: sample " + std::to_string(id) + " is in both train and test");
  for (const auto& s : train_set.samples) {
    const bool leaked = s.synthetic ? (test.count(s.primary_parent) || test.count(s.adjacent_parent))
                                    : test.count(s.id) != 0;
    if (leaked || s.group_id == fold.held_out_group)
      throw DataError("leakage: held-out group '" + fold.held_out_group +
                      "' reached the training set");
  }
}

}  // namespace ordcollab
