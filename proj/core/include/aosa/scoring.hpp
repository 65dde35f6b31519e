#pragma once

#include <span>
#include <vector>

#include "aosa/classes.hpp"
#include "aosa/knn_index.hpp"

namespace aosa {

/// Per-class neighbor counts, indexed by position in `classes`. A
/// neighbor whose label is not in `classes` is a ContractViolation.
std::vector<int> neighbor_histogram(const NeighborList& neighbors, const ClassSet& classes);

/// Same, but silently skips neighbors outside `classes` (invalid marks).
std::vector<int> known_neighbor_histogram(const NeighborList& neighbors, const ClassSet& classes);

double log_sum_exp(std::span<const double> values);

/// exp(v) / sum exp(v), shifted by max(v) first.
std::vector<double> softmax_normalize(std::span<const double> counts);
std::vector<double> softmax_normalize(std::span<const int> counts);

/// Cross-entropy between the prediction P and softmax(V), natural log:
///   -sum_c P[c] * log softmax(V)[c]
/// Large when the classifier disagrees with the local label distribution.
double inconsistency_score(std::span<const double> prediction, std::span<const double> counts);
double inconsistency_score(std::span<const double> prediction, std::span<const int> counts);

/// Shannon entropy in nats, 0 log 0 = 0.
double entropy(std::span<const double> prediction);

struct ScoreRecord {
  SampleId id = 0;
  std::vector<double> prediction;
  std::vector<int> counts;
  std::vector<double> normalized_counts;
  double score = 0.0;
};

ScoreRecord score_candidate(SampleId id, std::vector<double> prediction, const NeighborList& neighbors,
                            const ClassSet& classes);

}  // namespace aosa
