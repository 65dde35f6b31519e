#include "aosa/knn_index.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "aosa/errors.hpp"

namespace aosa {

double cosine_distance(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size())
    throw ContractViolation("cosine_distance: dimension mismatch (" + std::to_string(u.size()) +
                            " vs " + std::to_string(v.size()) + ")");
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += static_cast<double>(u[i]) * v[i];
  return std::clamp(1.0 - dot, 0.0, 2.0);
}

KnnIndex::KnnIndex(std::uint32_t dim) : dim_(dim) {
  if (dim == 0) throw ContractViolation("KnnIndex: dim must be positive");
}

void KnnIndex::add(SampleId id, ClassLabel label, std::span<const float> feature) {
  if (feature.size() != dim_)
    throw ContractViolation("KnnIndex::add: feature length " + std::to_string(feature.size()) +
                            " != dim " + std::to_string(dim_));
  auto pos = std::lower_bound(sorted_ids_.begin(), sorted_ids_.end(), id);
  if (pos != sorted_ids_.end() && *pos == id)
    throw StateError("KnnIndex::add: id " + std::to_string(id) + " already indexed");
  sorted_ids_.insert(pos, id);
  ids_.push_back(id);
  labels_.push_back(label);
  features_.insert(features_.end(), feature.begin(), feature.end());
}

NeighborList KnnIndex::query(std::span<const float> x, std::size_t K, SampleId query_id) const {
  if (K < 1) throw ContractViolation("query_knn: K must be >= 1");
  if (x.size() != dim_) throw ContractViolation("query_knn: query dimension mismatch");
  if (empty()) throw StateError("query_knn: index holds no labeled samples");

  struct Entry {
    double distance;
    SampleId id;
    std::size_t slot;
  };
  // Max-heap on (distance, id): top is the current worst kept neighbor.
  auto worse = [](const Entry& a, const Entry& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);

  const std::size_t keep = std::min(K, size());
  for (std::size_t i = 0; i < size(); ++i) {
    const double d = cosine_distance(x, feature(i));
    if (heap.size() < keep) {
      heap.push({d, ids_[i], i});
    } else {
      const Entry& top = heap.top();
      if (d < top.distance || (d == top.distance && ids_[i] < top.id)) {
        heap.pop();
        heap.push({d, ids_[i], i});
      }
    }
  }

  NeighborList out;
  out.query_id = query_id;
  out.neighbors.resize(heap.size());
  for (std::size_t i = heap.size(); i-- > 0;) {
    const Entry& e = heap.top();
    out.neighbors[i] = Neighbor{e.id, labels_[e.slot], e.distance};
    heap.pop();
  }
  return out;
}

KnnIndex build_index(std::span<const LabeledPoint> labeled) {
  if (labeled.empty()) throw StateError("build_index: labeled set is empty");
  KnnIndex index(static_cast<std::uint32_t>(labeled.front().feature.size()));
  for (const auto& p : labeled) index.add(p.id, p.label, p.feature);
  return index;
}

NeighborList query_knn(const KnnIndex& index, std::span<const float> x, std::size_t K, SampleId query_id) {
  return index.query(x, K, query_id);
}

double clusterability_slack(const FeatureStore& store, std::span<const ClassLabel> truth, std::size_t K) {
  if (truth.size() != store.size()) throw ContractViolation("clusterability_slack: truth length mismatch");
  if (store.size() < 2) return 0.0;
  KnnIndex all(store.dim());
  for (std::size_t j = 0; j < store.size(); ++j) all.add(store.id(j), truth[j], store.feature(j));

  std::size_t impure = 0;
  for (std::size_t row = 0; row < store.size(); ++row) {
    const auto nn = all.query(store.feature(row), K + 1, store.id(row));
    std::size_t seen = 0;
    for (const auto& n : nn.neighbors) {
      if (n.id == store.id(row)) continue;
      if (seen++ == K) break;
      if (n.label != truth[row]) {
        ++impure;
        break;
      }
    }
  }
  return static_cast<double>(impure) / static_cast<double>(store.size());
}

}  // namespace aosa
