#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ordcollab/corpus.hpp"
#include "ordcollab/labels.hpp"
#include "ordcollab/rng.hpp"

namespace ordcollab {

enum class MixupMode {
  Full,     // synthetic samples only, n per class
  Limited,  // originals plus top-up to n per class
};

std::string_view to_string(MixupMode mode);
MixupMode parse_mixup_mode(std::string_view text);

struct MixupConfig {
  double alpha = 0.4;
  double tau = 0.75;
  std::size_t n_per_class = 200;
  MixupMode mode = MixupMode::Full;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// Beta(alpha, alpha) draw conditioned on lambda >= tau, by rejection.
double sample_lambda(double alpha, double tau, Rng& rng);

/// lambda * s1 + (1 - lambda) * s2 for features and labels. The result is
/// marked synthetic with s1/s2 recorded as primary/adjacent parents.
FeatureSample mix_samples(const FeatureSample& s1, const FeatureSample& s2, double lambda);

/// Neighbour classes used for pairing, in rubric order.
std::vector<std::size_t> adjacent_classes(std::size_t label,
                                          const OrdinalLabelScheme& scheme = OrdinalLabelScheme::standard());

struct MixupTrace {
  std::vector<double> lambdas;          // one per synthetic sample
  std::vector<std::size_t> primaries;   // primary class of each synthetic sample
};

/// Class-targeted Mixup over `train`. Classes are taken by argmax label.
/// `trace`, when given, receives the lambda and primary class per
/// synthetic sample in output order.
Dataset controlled_mixup(const Dataset& train, const MixupConfig& cfg, Rng& rng,
                         MixupTrace* trace = nullptr);

}  // namespace ordcollab
