#include "aosa/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "aosa/errors.hpp"
#include "aosa/random.hpp"
#include "aosa/scoring.hpp"

namespace aosa {
namespace {

struct Ranked {
  SampleId id;
  double key;
  double tiebreak;
};

// Scores are ranked on a 1e-12 grid; closer values tie and fall back to id order.
constexpr double kRankResolution = 1e-12;

double rank_key(double score) { return std::nearbyint(score / kRankResolution) * kRankResolution; }

bool rank_less(double a, double b) { return rank_key(a) < rank_key(b); }
bool rank_equal(double a, double b) { return rank_key(a) == rank_key(b); }

const Predictor& need_predictor(const SelectionContext& ctx, std::string_view who) {
  if (!ctx.predictor) throw StateError(std::string(who) + ": strategy needs a trained classifier");
  return *ctx.predictor;
}

std::vector<double> prediction_for(const SelectionContext& ctx, const Predictor& predictor, SampleId id) {
  return predictor.predict(id, ctx.store.feature(ctx.store.require_row(id)));
}

// Keeps a computed assessment alive when the context did not supply one.
class AssessmentRef {
 public:
  explicit AssessmentRef(const SelectionContext& ctx) {
    if (ctx.assessment) {
      ptr_ = ctx.assessment;
    } else {
      owned_ = assess_pool(ctx.store, ctx.state, ctx.index, ctx.K, ctx.round);
      ptr_ = &owned_;
    }
  }
  const PoolAssessment& operator*() const { return *ptr_; }
  const PoolAssessment* operator->() const { return ptr_; }

 private:
  PoolAssessment owned_;
  const PoolAssessment* ptr_ = nullptr;
};

/// Fills `batch` up to the budget with non-candidate pool samples, best
/// known-neighbor fraction first. `tiebreak` (higher first) separates
/// equal fractions before falling back to id.
void fill_from_fallback(const SelectionContext& ctx, const PoolAssessment& pa, QueryBatch& batch,
                        const std::function<double(std::size_t)>& tiebreak) {
  const std::size_t want = std::min(ctx.budget, pa.pool.size());
  if (batch.ids.size() >= want) return;

  std::vector<Ranked> rest;
  for (std::size_t i = 0; i < pa.pool.size(); ++i) {
    const SampleId id = pa.pool[i];
    if (std::binary_search(pa.candidates.members.begin(), pa.candidates.members.end(), id)) continue;
    rest.push_back({id, pa.candidates.known_fraction.at(id), tiebreak ? tiebreak(i) : 0.0});
  }
  std::sort(rest.begin(), rest.end(), [](const Ranked& a, const Ranked& b) {
    if (a.key != b.key) return a.key > b.key;
    if (!rank_equal(a.tiebreak, b.tiebreak)) return rank_less(b.tiebreak, a.tiebreak);
    return a.id < b.id;
  });
  for (const auto& r : rest) {
    if (batch.ids.size() >= want) break;
    batch.ids.push_back(r.id);
    batch.scores.push_back(r.key);
  }
}

std::function<double(std::size_t)> known_only_inconsistency(const SelectionContext& ctx, const PoolAssessment& pa) {
  if (!ctx.predictor) return {};
  return [&ctx, &pa](std::size_t i) {
    const auto& predictor = *ctx.predictor;
    const auto p = prediction_for(ctx, predictor, pa.pool[i]);
    const auto v = known_neighbor_histogram(pa.neighbors[i], predictor.classes());
    return inconsistency_score(p, std::span<const int>(v));
  };
}

std::vector<std::size_t> candidate_positions(const PoolAssessment& pa) {
  std::vector<std::size_t> pos;
  pos.reserve(pa.candidates.members.size());
  for (std::size_t i = 0; i < pa.pool.size(); ++i) {
    if (std::binary_search(pa.candidates.members.begin(), pa.candidates.members.end(), pa.pool[i]))
      pos.push_back(i);
  }
  return pos;
}

QueryBatch take_top(const SelectionContext& ctx, std::vector<Ranked> ranked, bool descending) {
  std::sort(ranked.begin(), ranked.end(), [descending](const Ranked& a, const Ranked& b) {
    if (!rank_equal(a.key, b.key)) return descending ? rank_less(b.key, a.key) : rank_less(a.key, b.key);
    return a.id < b.id;
  });
  QueryBatch batch;
  batch.round = ctx.round;
  for (const auto& r : ranked) {
    if (batch.ids.size() >= ctx.budget) break;
    batch.ids.push_back(r.id);
    batch.scores.push_back(r.key);
  }
  return batch;
}

QueryBatch shuffled_candidates(const SelectionContext& ctx, const PoolAssessment& pa) {
  std::vector<SampleId> members = pa.candidates.members;
  Rng rng(ctx.seed);
  std::shuffle(members.begin(), members.end(), rng);
  QueryBatch batch;
  batch.round = ctx.round;
  members.resize(std::min(members.size(), ctx.budget));
  batch.ids = std::move(members);
  batch.scores.assign(batch.ids.size(), 1.0);
  fill_from_fallback(ctx, pa, batch, known_only_inconsistency(ctx, pa));
  return batch;
}

QueryBatch select_by_entropy(const SelectionContext& ctx, bool most_uncertain, std::string_view who) {
  const auto& predictor = need_predictor(ctx, who);
  auto entropy_of = [&](SampleId id) { return entropy(prediction_for(ctx, predictor, id)); };

  if (!ctx.prefilter) {
    std::vector<Ranked> ranked;
    ranked.reserve(ctx.state.pool.size());
    for (SampleId id : ctx.state.pool) ranked.push_back({id, entropy_of(id), 0.0});
    return take_top(ctx, std::move(ranked), most_uncertain);
  }

  AssessmentRef pa(ctx);
  std::vector<Ranked> ranked;
  for (SampleId id : pa->candidates.members) ranked.push_back({id, entropy_of(id), 0.0});
  auto batch = take_top(ctx, std::move(ranked), most_uncertain);
  fill_from_fallback(ctx, *pa, batch, [&](std::size_t i) {
    const double h = entropy_of(pa->pool[i]);
    return most_uncertain ? h : -h;
  });
  return batch;
}

}  // namespace

StrategyKind parse_strategy(std::string_view name) {
  if (name == "neat") return StrategyKind::neat;
  if (name == "neat_passive") return StrategyKind::neat_passive;
  if (name == "random") return StrategyKind::random;
  if (name == "uncertainty") return StrategyKind::uncertainty;
  if (name == "certainty") return StrategyKind::certainty;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::string_view strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::neat: return "neat";
    case StrategyKind::neat_passive: return "neat_passive";
    case StrategyKind::random: return "random";
    case StrategyKind::uncertainty: return "uncertainty";
    case StrategyKind::certainty: return "certainty";
  }
  return "unknown";
}

PoolAssessment assess_pool(const FeatureStore& store, const PartitionState& state, const KnnIndex& index,
                           std::size_t K, std::size_t round) {
  if (K < 1) throw ContractViolation("assess_pool: K must be >= 1");
  PoolAssessment pa;
  pa.pool.assign(state.pool.begin(), state.pool.end());
  if (pa.pool.empty()) {
    pa.candidates.round = round;
    return pa;
  }
  pa.neighbors = pool_neighbors(pa.pool, store, index, K);
  pa.candidates = detect_known_from_neighbors(pa.neighbors, state.known, round);
  return pa;
}

QueryBatch select_neat(const SelectionContext& ctx) {
  const auto& predictor = need_predictor(ctx, "neat");
  AssessmentRef pa(ctx);

  std::vector<Ranked> ranked;
  for (std::size_t i : candidate_positions(*pa)) {
    const SampleId id = pa->pool[i];
    const auto v = neighbor_histogram(pa->neighbors[i], predictor.classes());
    ranked.push_back({id, inconsistency_score(prediction_for(ctx, predictor, id), std::span<const int>(v)), 0.0});
  }
  auto batch = take_top(ctx, std::move(ranked), true);
  fill_from_fallback(ctx, *pa, batch, known_only_inconsistency(ctx, *pa));
  return batch;
}

QueryBatch select_neat_passive(const SelectionContext& ctx) {
  AssessmentRef pa(ctx);
  return shuffled_candidates(ctx, *pa);
}

QueryBatch select_random(const SelectionContext& ctx) {
  if (ctx.prefilter) return select_neat_passive(ctx);
  std::vector<SampleId> pool(ctx.state.pool.begin(), ctx.state.pool.end());
  Rng rng(ctx.seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(pool.size(), ctx.budget));
  QueryBatch batch;
  batch.round = ctx.round;
  batch.ids = std::move(pool);
  return batch;
}

QueryBatch select_uncertainty(const SelectionContext& ctx) { return select_by_entropy(ctx, true, "uncertainty"); }

QueryBatch select_certainty(const SelectionContext& ctx) { return select_by_entropy(ctx, false, "certainty"); }

QueryBatch select_batch(StrategyKind kind, const SelectionContext& ctx) {
  if (ctx.budget < 1) throw ContractViolation("select: budget must be >= 1");
  switch (kind) {
    case StrategyKind::neat: return select_neat(ctx);
    case StrategyKind::neat_passive: return select_neat_passive(ctx);
    case StrategyKind::random: return select_random(ctx);
    case StrategyKind::uncertainty: return select_uncertainty(ctx);
    case StrategyKind::certainty: return select_certainty(ctx);
  }
  throw ContractViolation("select: unhandled strategy");
}

}  // namespace aosa
