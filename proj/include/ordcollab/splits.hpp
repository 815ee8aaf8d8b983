#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "ordcollab/corpus.hpp"

namespace ordcollab {

/// One leave-one-group-out fold; ids index into the source dataset.
struct FoldSpec {
  std::string held_out_group;
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> test_ids;
};

/// One fold per non-pinned group, ordered by group id. Pinned groups are
/// always trained on. Throws DataError if a non-pinned group holds every
/// sample of some class, naming the group to pin.
std::vector<FoldSpec> logo_splits(const Dataset& dataset,
                                  const std::set<std::string>& pinned_groups);

/// Groups that alone hold every sample of some class.
std::set<std::string> sole_holder_groups(const Dataset& dataset);

/// Sole holders if any; otherwise the group with the most samples of the
/// rarest present class (ties to the lowest group id).
std::set<std::string> auto_pinned_groups(const Dataset& dataset);

/// Throws DataError if a test sample, or a Mixup parent of a training
/// sample, appears on both sides of the fold.
void assert_no_leakage(const FoldSpec& fold, const Dataset& train_set);

}  // namespace ordcollab
