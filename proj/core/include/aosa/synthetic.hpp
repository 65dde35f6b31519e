#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aosa/feature_store.hpp"

namespace aosa {

/// Gaussian-mixture dataset description.
///
/// Cluster c has center `cluster_separation * u_c` (u_c a random unit
/// direction) and isotropic noise `noise_sigma`. Every sample's observed
/// label is its cluster index, flipped to a uniformly random other class
/// with probability `label_flip_rate`. `sigma_K` is the clusterability
/// slack the regime is expected to stay under (checked by tests, not
/// enforced by the generator).
struct SyntheticSpec {
  std::size_t n_clusters = 6;
  std::size_t known_clusters = 3;
  std::size_t per_cluster = 100;
  std::uint32_t dim = 16;
  double cluster_separation = 1.0;
  double noise_sigma = 0.1;
  double label_flip_rate = 0.0;
  double sigma_K = 0.0;
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct SyntheticDataset {
  FeatureStore store;
  /// Cluster identity per row (the label before flipping).
  std::vector<ClassLabel> true_cluster;
  std::size_t flipped = 0;
};

/// Ids run 0..n-1, cluster-major. Deterministic in `spec.seed`.
SyntheticDataset generate_synthetic_dataset(const SyntheticSpec& spec);

FeatureStore generate_synthetic(const SyntheticSpec& spec);

}  // namespace aosa
