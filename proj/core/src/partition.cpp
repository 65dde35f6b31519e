#include "aosa/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "aosa/errors.hpp"
#include "aosa/random.hpp"

namespace aosa {

PartitionState split_initial(const FeatureStore& store, const ClassSet& known,
                             double init_fraction, double test_fraction, std::uint64_t seed) {
  if (known.empty()) throw ConfigError("split: known class set is empty");
  if (!(init_fraction > 0.0 && init_fraction < 1.0))
    throw ConfigError("split: init_fraction must lie in (0, 1)");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0))
    throw ConfigError("split: test_fraction must lie in [0, 1)");

  std::vector<std::vector<std::size_t>> rows_by_class(known.size());
  PartitionState state;
  state.known = known;
  for (std::size_t row = 0; row < store.size(); ++row) {
    if (auto k = known.index_of(store.label(row))) {
      rows_by_class[*k].push_back(row);
    } else {
      state.pool.insert(store.id(row));
    }
  }

  Rng rng(seed);
  for (std::size_t k = 0; k < known.size(); ++k) {
    auto& rows = rows_by_class[k];
    const std::string name = "known class " + std::to_string(known.at(k));
    if (rows.empty()) throw ConfigError("split: " + name + " has no samples");
    std::shuffle(rows.begin(), rows.end(), rng);

    const auto n_test = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(rows.size())));
    const std::size_t rest = rows.size() - n_test;
    if (rest == 0) throw ConfigError("split: " + name + " has no samples left after the test share");
    const auto n_init = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(init_fraction * static_cast<double>(rest))));

    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::size_t row = rows[i];
      if (i < n_test) {
        state.test.insert(store.id(row));
      } else if (i < n_test + n_init) {
        state.labeled.emplace(store.id(row), store.label(row));
      } else {
        state.pool.insert(store.id(row));
      }
    }
  }
  return state;
}

void check_partition(const PartitionState& state, const FeatureStore& store) {
  auto fail = [](const std::string& what) { throw StateError("partition invariant: " + what); };
  for (const auto& [id, label] : state.labeled) {
    if (state.pool.contains(id) || state.test.contains(id) || state.invalid.contains(id))
      fail("labeled id " + std::to_string(id) + " also in another set");
    if (!state.known.contains(label)) fail("labeled id " + std::to_string(id) + " carries a non-known label");
  }
  for (SampleId id : state.pool) {
    if (state.test.contains(id) || state.invalid.contains(id))
      fail("pool id " + std::to_string(id) + " also in another set");
  }
  for (SampleId id : state.test) {
    if (state.invalid.contains(id)) fail("test id " + std::to_string(id) + " also invalid");
  }
  if (state.total() != store.size())
    fail("set sizes sum to " + std::to_string(state.total()) + ", store has " + std::to_string(store.size()));
}

}  // namespace aosa
