#include "aosa/detection.hpp"

#include <algorithm>

#include "aosa/errors.hpp"

namespace aosa {

double known_neighbor_fraction(const NeighborList& neighbors, const ClassSet& known) {
  if (neighbors.neighbors.empty()) throw StateError("known_neighbor_fraction: no neighbors");
  const auto n_known = std::count_if(neighbors.neighbors.begin(), neighbors.neighbors.end(),
                                     [&](const Neighbor& n) { return known.contains(n.label); });
  return static_cast<double>(n_known) / static_cast<double>(neighbors.size());
}

double known_neighbor_fraction(SampleId x, const FeatureStore& store, const KnnIndex& index,
                               const ClassSet& known, std::size_t K) {
  const auto row = store.require_row(x);
  return known_neighbor_fraction(index.query(store.feature(row), K, x), known);
}

bool all_neighbors_known(const NeighborList& neighbors, const ClassSet& known) {
  if (neighbors.neighbors.empty()) throw StateError("detect_known: no neighbors");
  return std::all_of(neighbors.neighbors.begin(), neighbors.neighbors.end(),
                     [&](const Neighbor& n) { return known.contains(n.label); });
}

std::vector<NeighborList> pool_neighbors(std::span<const SampleId> pool, const FeatureStore& store,
                                         const KnnIndex& index, std::size_t K) {
  if (index.empty()) throw StateError("detect_known: labeled set is empty");
  std::vector<NeighborList> out;
  out.reserve(pool.size());
  for (SampleId id : pool) out.push_back(index.query(store.feature(store.require_row(id)), K, id));
  return out;
}

CandidateSet detect_known_from_neighbors(std::span<const NeighborList> lists, const ClassSet& known,
                                         std::size_t round) {
  CandidateSet out;
  out.round = round;
  for (const auto& list : lists) {
    const double frac = known_neighbor_fraction(list, known);
    out.known_fraction.emplace(list.query_id, frac);
    if (all_neighbors_known(list, known)) out.members.push_back(list.query_id);
  }
  std::sort(out.members.begin(), out.members.end());
  return out;
}

CandidateSet detect_known(std::span<const SampleId> pool, const FeatureStore& store,
                          const KnnIndex& index, const ClassSet& known, std::size_t K,
                          std::size_t round) {
  if (K < 1) throw ContractViolation("detect_known: K must be >= 1");
  const auto lists = pool_neighbors(pool, store, index, K);
  return detect_known_from_neighbors(lists, known, round);
}

DetectionQuality measure_detection_quality(const CandidateSet& candidates, std::span<const SampleId> pool,
                                           const FeatureStore& store, const ClassSet& known) {
  auto truly_known = [&](SampleId id) { return known.contains(store.label(store.require_row(id))); };

  DetectionQuality q;
  const auto hits = static_cast<std::size_t>(
      std::count_if(candidates.members.begin(), candidates.members.end(), truly_known));
  if (!candidates.members.empty())
    q.precision = static_cast<double>(hits) / static_cast<double>(candidates.members.size());
  const auto known_in_pool = static_cast<std::size_t>(std::count_if(pool.begin(), pool.end(), truly_known));
  q.recall = known_in_pool == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(known_in_pool);
  return q;
}

}  // namespace aosa
