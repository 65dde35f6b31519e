#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aosa/detection.hpp"
#include "aosa/feature_store.hpp"
#include "aosa/knn_index.hpp"
#include "aosa/model.hpp"
#include "aosa/partition.hpp"

namespace aosa {

enum class StrategyKind { neat, neat_passive, random, uncertainty, certainty };

/// Accepts the configuration names: neat, neat_passive, random,
/// uncertainty, certainty. Anything else is a ConfigError.
StrategyKind parse_strategy(std::string_view name);
std::string_view strategy_name(StrategyKind kind);

struct QueryBatch {
  std::size_t round = 0;
  std::vector<SampleId> ids;
  /// Parallel to ids when the strategy ranks by a score.
  std::vector<double> scores;
};

/// Pool neighbors and detector output, computed once per round and shared.
struct PoolAssessment {
  std::vector<SampleId> pool;
  std::vector<NeighborList> neighbors;
  CandidateSet candidates;
};

PoolAssessment assess_pool(const FeatureStore& store, const PartitionState& state, const KnnIndex& index,
                           std::size_t K, std::size_t round = 0);

struct SelectionContext {
  const FeatureStore& store;
  const PartitionState& state;
  const KnnIndex& index;
  /// Required by neat, uncertainty and certainty.
  const Predictor* predictor = nullptr;
  std::size_t K = 10;
  std::size_t budget = 400;
  std::uint64_t seed = 0;
  std::size_t round = 0;
  /// Restrict uncertainty/certainty/random to detected candidates first.
  bool prefilter = false;
  /// Reused when present, otherwise computed on demand.
  const PoolAssessment* assessment = nullptr;
};

/// Top-budget candidates by descending inconsistency, ties by id. When the
/// candidate set is short, the remainder comes from the other pool samples
/// ranked by known-neighbor fraction, then by inconsistency over their
/// known-labeled neighbors, then by id.
QueryBatch select_neat(const SelectionContext& ctx);

/// Uniform random subset of the candidates, same fallback as select_neat.
QueryBatch select_neat_passive(const SelectionContext& ctx);

QueryBatch select_random(const SelectionContext& ctx);

/// Highest predictive entropy first.
QueryBatch select_uncertainty(const SelectionContext& ctx);

/// Lowest predictive entropy first.
QueryBatch select_certainty(const SelectionContext& ctx);

QueryBatch select_batch(StrategyKind kind, const SelectionContext& ctx);

}  // namespace aosa
