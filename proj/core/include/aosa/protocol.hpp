#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aosa/classes.hpp"
#include "aosa/feature_store.hpp"
#include "aosa/knn_index.hpp"
#include "aosa/model.hpp"
#include "aosa/partition.hpp"
#include "aosa/strategies.hpp"

namespace aosa {

struct ProtocolConfig {
  std::size_t rounds = 9;
  std::size_t budget = 400;
  std::size_t K = 10;
  StrategyKind strategy = StrategyKind::neat;
  bool prefilter = false;
  /// Invalid-marked queries join the neighbor search as non-known labels.
  bool use_invalid_neighbors = true;
  ClassSet known;
  double init_fraction = 0.01;
  double test_fraction = 0.2;
  /// Split, per-round training and strategy seeds all derive from this.
  std::uint64_t seed = 0;
  TrainConfig train;

  void validate() const;
};

struct RoundReport {
  std::size_t round = 0;
  std::size_t selected = 0;
  std::size_t known_selected = 0;
  double precision = 0.0;
  double recall_cumulative = 0.0;
  /// NaN when the run has no test set.
  double test_accuracy = 0.0;
  std::size_t labeled_size = 0;
  std::size_t candidate_set_size = 0;

  friend bool operator==(const RoundReport&, const RoundReport&) = default;
};

struct Annotation {
  std::vector<std::pair<SampleId, ClassLabel>> known_labeled;
  std::vector<SampleId> invalid;
};

/// Ground-truth lookup: known-class samples get their label, the rest are invalid.
Annotation oracle_annotate(const QueryBatch& batch, const FeatureStore& store, const ClassSet& known);

/// Moves the whole batch out of the pool; known labels join the labeled
/// set, invalid ids the invalid list. Re-applying an id is a StateError.
void apply_round(PartitionState& state, const Annotation& annotation);

struct RoundMetrics {
  double precision = 0.0;
  double recall_cumulative = 0.0;
};

/// precision = known_selected / selected; recall sums known_selected over
/// `previous` and this round, divided by `n_total_known`. With no known
/// samples in the initial pool recall is reported as 1.
RoundMetrics compute_metrics(std::span<const RoundReport> previous, std::size_t selected,
                             std::size_t known_selected, std::size_t n_total_known);

/// Index over the labeled set, plus invalid ids (label kInvalidLabel) when
/// `use_invalid_neighbors` is set.
KnnIndex index_for_state(const FeatureStore& store, const PartitionState& state, bool use_invalid_neighbors);

/// Stepwise driver of the query loop.
///
/// Each step selects with the current model, annotates, applies, retrains
/// on the grown labeled set and evaluates it on the test set. The model a
/// round reports on is the one the next round selects with.
class ProtocolRun {
 public:
  /// `external` replaces the trained classifier when non-null; it must
  /// outlive the run.
  ProtocolRun(ProtocolConfig cfg, const FeatureStore& store, const Predictor* external = nullptr);

  /// Runs one round. Returns false (doing nothing) once all rounds are
  /// done or the pool is empty. Module errors surface as ProtocolError.
  bool step();

  const PartitionState& state() const noexcept { return state_; }
  const std::vector<RoundReport>& reports() const noexcept { return reports_; }
  std::size_t n_total_known() const noexcept { return n_total_known_; }
  /// True when the pool ran dry before all rounds were played.
  bool truncated() const noexcept;
  const ProtocolConfig& config() const noexcept { return cfg_; }

 private:
  void retrain();
  double test_accuracy() const;
  const Predictor& predictor() const;

  ProtocolConfig cfg_;
  const FeatureStore& store_;
  const Predictor* external_;
  PartitionState state_;
  std::optional<Classifier> model_;
  KnnIndex index_;
  std::vector<RoundReport> reports_;
  std::size_t n_total_known_ = 0;
};

struct ProtocolResult {
  std::vector<RoundReport> rounds;
  bool truncated = false;
  std::size_t n_total_known = 0;
  std::size_t n_samples = 0;
};

ProtocolResult run_protocol(const ProtocolConfig& cfg, const FeatureStore& store,
                            const Predictor* external = nullptr);

inline constexpr std::string_view kRoundsCsvHeader =
    "round,selected,known_selected,precision,recall_cum,test_accuracy,labeled_size,candidate_set_size";

std::string rounds_csv(std::span<const RoundReport> rounds);

/// Parses what rounds_csv writes; `source` names the file in errors.
std::vector<RoundReport> parse_rounds_csv(std::string_view text, std::string_view source);

}  // namespace aosa
