#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aosa/feature_store.hpp"
#include "aosa/types.hpp"

namespace aosa {

struct Neighbor {
  SampleId id = 0;
  ClassLabel label = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Neighbors ordered by (distance, id) ascending.
struct NeighborList {
  SampleId query_id = 0;
  std::vector<Neighbor> neighbors;

  std::size_t size() const noexcept { return neighbors.size(); }
};

/// 1 - <u, v> for unit vectors, accumulated in double and clamped to [0, 2].
double cosine_distance(std::span<const float> u, std::span<const float> v);

struct LabeledPoint {
  SampleId id = 0;
  ClassLabel label = 0;
  std::span<const float> feature;
};

/// Exact K-NN over a growing set of labeled points under cosine distance.
///
/// Queries scan every stored point and keep a bounded heap ordered by
/// (distance, id), so results never depend on insertion order. Points can
/// be appended between queries; there is no removal.
class KnnIndex {
 public:
  explicit KnnIndex(std::uint32_t dim);

  /// Duplicate ids are a StateError; wrong length is a ContractViolation.
  void add(SampleId id, ClassLabel label, std::span<const float> feature);

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  std::uint32_t dim() const noexcept { return dim_; }

  /// The min(K, size()) nearest points. K < 1 is a ContractViolation, an
  /// empty index a StateError.
  NeighborList query(std::span<const float> x, std::size_t K, SampleId query_id = 0) const;

  SampleId id(std::size_t i) const { return ids_[i]; }
  ClassLabel label(std::size_t i) const { return labels_[i]; }
  std::span<const float> feature(std::size_t i) const { return {features_.data() + i * dim_, dim_}; }

 private:
  std::uint32_t dim_;
  std::vector<SampleId> ids_;
  std::vector<ClassLabel> labels_;
  std::vector<float> features_;
  std::vector<SampleId> sorted_ids_;
};

/// Empty input is a StateError.
KnnIndex build_index(std::span<const LabeledPoint> labeled);

NeighborList query_knn(const KnnIndex& index, std::span<const float> x, std::size_t K,
                       SampleId query_id = 0);

/// Fraction of samples whose K nearest other samples (over the whole store)
/// include one with a different `truth` label.
double clusterability_slack(const FeatureStore& store, std::span<const ClassLabel> truth, std::size_t K);

}  // namespace aosa
