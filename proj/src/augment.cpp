#include "ordcollab/augment.hpp"

#include <random>
#include <string>

#include "ordcollab/error.hpp"

namespace ordcollab {

std::string_view to_string(MixupMode mode) { return mode == MixupMode::Full ? "Full" : "Limited"; }

MixupMode parse_mixup_mode(std::string_view text) {
  if (text == "Full") return MixupMode::Full;
  if (text == "Limited") return MixupMode::Limited;
  throw ConfigError("unknown mixup mode '" + std::string(text) + "' (expected Full or Limited)");
}

void MixupConfig::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("mixup alpha must be > 0");
  if (!(tau >= 0.0 && tau < 1.0)) throw ConfigError("mixup tau must lie in [0, 1)");
  if (n_per_class < 1) throw ConfigError("mixup n_per_class must be >= 1");
}

double sample_lambda(double alpha, double tau, Rng& rng) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  for (;;) {
    const double a = gamma(rng);
    const double b = gamma(rng);
    const double sum = a + b;
    // Both draws can underflow to zero for small alpha; the limit is a fair coin.
    const double lambda = sum > 0.0 ? a / sum : (uniform01(rng) < 0.5 ? 0.0 : 1.0);
    if (lambda >= tau) return lambda;
  }
}

FeatureSample mix_samples(const FeatureSample& s1, const FeatureSample& s2, double lambda) {
  if (s1.features.size() != s2.features.size())
    throw DataError("mix_samples: feature dimension mismatch (" +
                    std::to_string(s1.features.size()) + " vs " +
                    std::to_string(s2.features.size()) + ")");
  FeatureSample out;
  out.features.resize(s1.features.size());
  const double rest = 1.0 - lambda;
  for (std::size_t i = 0; i < out.features.size(); ++i)
    out.features[i] = lambda * s1.features[i] + rest * s2.features[i];
  for (std::size_t i = 0; i < kNumClasses; ++i)
    out.label[i] = lambda * s1.label[i] + rest * s2.label[i];
  out.synthetic = true;
  out.primary_parent = s1.id;
  out.adjacent_parent = s2.id;
  return out;
}

std::vector<std::size_t> adjacent_classes(std::size_t label, const OrdinalLabelScheme& scheme) {
  auto adj = scheme.adjacent(label);
  return {adj.begin(), adj.end()};
}

Dataset controlled_mixup(const Dataset& train, const MixupConfig& cfg, Rng& rng,
                         MixupTrace* trace) {
  cfg.validate();
  const auto& scheme = OrdinalLabelScheme::standard();
  std::array<std::vector<std::size_t>, kNumClasses> pools;
  for (std::size_t i = 0; i < train.samples.size(); ++i)
    pools[train.samples[i].label_index()].push_back(i);

  std::array<std::size_t, kNumClasses> wanted{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto have = pools[c].size();
    wanted[c] = cfg.mode == MixupMode::Full ? cfg.n_per_class
                                            : (have >= cfg.n_per_class ? 0 : cfg.n_per_class - have);
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (wanted[c] == 0) continue;
    if (pools[c].empty())
      throw DataError("controlled_mixup: class '" + scheme.name(c) +
                      "' has no training samples to oversample");
    for (auto a : scheme.adjacent(c))
      if (pools[a].empty())
        throw DataError("controlled_mixup: adjacent class '" + scheme.name(a) + "' of '" +
                        scheme.name(c) + "' has no training samples");
  }

  Dataset out;
  out.feature_kind = train.feature_kind;
  if (cfg.mode == MixupMode::Limited) out.samples = train.samples;
  if (trace) {
    trace->lambdas.clear();
    trace->primaries.clear();
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto adj = scheme.adjacent(c);
    for (std::size_t k = 0; k < wanted[c]; ++k) {
      const auto& primary = train.samples[pools[c][uniform_index(rng, pools[c].size())]];
      const auto& pool = pools[adj[uniform_index(rng, adj.size())]];
      const auto& neighbour = train.samples[pool[uniform_index(rng, pool.size())]];
      const double lambda = sample_lambda(cfg.alpha, cfg.tau, rng);
      auto s = mix_samples(primary, neighbour, lambda);
      s.group_id = "synthetic";
      out.samples.push_back(std::move(s));
      if (trace) {
        trace->lambdas.push_back(lambda);
        trace->primaries.push_back(c);
      }
    }
  }
  return out;
}

}  // namespace ordcollab
