#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "aosa/classes.hpp"
#include "aosa/feature_store.hpp"
#include "aosa/knn_index.hpp"

namespace aosa {

/// Pool samples admitted as known-class by the all-K-neighbors rule.
struct CandidateSet {
  std::size_t round = 0;
  std::vector<SampleId> members;
  /// Every assessed pool sample, members or not.
  std::map<SampleId, double> known_fraction;
};

/// Share of neighbors whose label is in `known`; neighbors carrying the
/// invalid mark never count. An empty list is a StateError.
double known_neighbor_fraction(const NeighborList& neighbors, const ClassSet& known);

double known_neighbor_fraction(SampleId x, const FeatureStore& store, const KnnIndex& index,
                               const ClassSet& known, std::size_t K);

/// True iff every neighbor carries a known-class label.
bool all_neighbors_known(const NeighborList& neighbors, const ClassSet& known);

/// K-NN lists for each pool id, in pool order.
std::vector<NeighborList> pool_neighbors(std::span<const SampleId> pool, const FeatureStore& store,
                                         const KnnIndex& index, std::size_t K);

CandidateSet detect_known_from_neighbors(std::span<const NeighborList> lists, const ClassSet& known,
                                         std::size_t round = 0);

CandidateSet detect_known(std::span<const SampleId> pool, const FeatureStore& store,
                          const KnnIndex& index, const ClassSet& known, std::size_t K,
                          std::size_t round = 0);

struct DetectionQuality {
  /// Absent when the candidate set is empty.
  std::optional<double> precision;
  double recall = 0.0;
};

/// Scores the detector against ground-truth labels in `store`. Recall is
/// over the known-class members of `pool`.
DetectionQuality measure_detection_quality(const CandidateSet& candidates, std::span<const SampleId> pool,
                                           const FeatureStore& store, const ClassSet& known);

}  // namespace aosa
