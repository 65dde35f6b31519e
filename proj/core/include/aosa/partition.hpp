#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>

#include "aosa/classes.hpp"
#include "aosa/feature_store.hpp"

namespace aosa {

/// Evolving experiment state.
///
/// `labeled` holds known-class annotations only; queried samples the
/// oracle marked invalid go to `invalid`. The four id sets are pairwise
/// disjoint.
struct PartitionState {
  std::map<SampleId, ClassLabel> labeled;
  std::set<SampleId> pool;
  std::set<SampleId> test;
  std::set<SampleId> invalid;
  ClassSet known;

  std::size_t total() const noexcept {
    return labeled.size() + pool.size() + test.size() + invalid.size();
  }
};

/// Initial split.
///
/// For each known class (rows shuffled with `seed`): the first
/// floor(test_fraction * n_c) rows form its test share, and of the rest
/// max(1, floor(init_fraction * rest)) become labeled. Everything else,
/// including every unknown-class sample, goes to the pool.
PartitionState split_initial(const FeatureStore& store, const ClassSet& known,
                             double init_fraction, double test_fraction, std::uint64_t seed);

/// Throws StateError if the partition invariants are broken.
void check_partition(const PartitionState& state, const FeatureStore& store);

}  // namespace aosa
