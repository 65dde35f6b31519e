#include "aosa/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aosa/errors.hpp"

namespace aosa {
namespace {

std::vector<double> to_double(std::span<const int> counts) {
  return {counts.begin(), counts.end()};
}

}  // namespace

std::vector<int> neighbor_histogram(const NeighborList& neighbors, const ClassSet& classes) {
  std::vector<int> counts(classes.size(), 0);
  for (const auto& n : neighbors.neighbors) {
    auto idx = classes.index_of(n.label);
    if (!idx)
      throw ContractViolation("neighbor_histogram: neighbor " + std::to_string(n.id) + " has label " +
                              std::to_string(n.label) + " outside the class set");
    ++counts[*idx];
  }
  return counts;
}

std::vector<int> known_neighbor_histogram(const NeighborList& neighbors, const ClassSet& classes) {
  std::vector<int> counts(classes.size(), 0);
  for (const auto& n : neighbors.neighbors) {
    if (auto idx = classes.index_of(n.label)) ++counts[*idx];
  }
  return counts;
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

std::vector<double> softmax_normalize(std::span<const double> counts) {
  std::vector<double> out(counts.size());
  if (counts.empty()) return out;
  const double m = *std::max_element(counts.begin(), counts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = std::exp(counts[i] - m);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

std::vector<double> softmax_normalize(std::span<const int> counts) {
  const auto d = to_double(counts);
  return softmax_normalize(std::span<const double>(d));
}

double inconsistency_score(std::span<const double> prediction, std::span<const double> counts) {
  if (prediction.size() != counts.size())
    throw ContractViolation("inconsistency_score: prediction has " + std::to_string(prediction.size()) +
                            " entries, counts has " + std::to_string(counts.size()));
  if (counts.empty()) return 0.0;
  // log softmax(V)[c] = (V[c] - m) - log sum_j exp(V[j] - m)
  const double m = *std::max_element(counts.begin(), counts.end());
  double sum = 0.0;
  for (double v : counts) sum += std::exp(v - m);
  const double log_norm = std::log(sum);

  double score = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (prediction[c] == 0.0) continue;
    score -= prediction[c] * ((counts[c] - m) - log_norm);
  }
  return std::max(score, 0.0);
}

double inconsistency_score(std::span<const double> prediction, std::span<const int> counts) {
  const auto d = to_double(counts);
  return inconsistency_score(prediction, std::span<const double>(d));
}

double entropy(std::span<const double> prediction) {
  double h = 0.0;
  for (double p : prediction) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

ScoreRecord score_candidate(SampleId id, std::vector<double> prediction, const NeighborList& neighbors,
                            const ClassSet& classes) {
  ScoreRecord rec;
  rec.id = id;
  rec.counts = neighbor_histogram(neighbors, classes);
  rec.normalized_counts = softmax_normalize(std::span<const int>(rec.counts));
  rec.score = inconsistency_score(prediction, std::span<const int>(rec.counts));
  rec.prediction = std::move(prediction);
  return rec;
}

}  // namespace aosa
