#include "aosa/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "aosa/csv.hpp"
#include "aosa/errors.hpp"
#include "aosa/random.hpp"

namespace aosa {
namespace {

constexpr std::uint64_t kSplitStream = 0;
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kSelectStream = 2;

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  return derive_seed(derive_seed(base, stream), index);
}

void check_batch(const QueryBatch& batch, const PartitionState& state, std::size_t budget) {
  const std::size_t want = std::min(budget, state.pool.size());
  if (batch.ids.size() != want)
    throw StateError("strategy returned " + std::to_string(batch.ids.size()) + " ids, expected " +
                     std::to_string(want));
  std::set<SampleId> seen;
  for (SampleId id : batch.ids) {
    if (!state.pool.contains(id)) throw StateError("strategy selected id " + std::to_string(id) + " outside the pool");
    if (!seen.insert(id).second) throw StateError("strategy selected id " + std::to_string(id) + " twice");
  }
}

}  // namespace

void ProtocolConfig::validate() const {
  if (rounds < 1) throw ConfigError("protocol: T (rounds) must be >= 1");
  if (budget < 1) throw ConfigError("protocol: B (budget) must be >= 1");
  if (K < 1) throw ConfigError("protocol: K must be >= 1");
  if (known.empty()) throw ConfigError("protocol: known_classes is empty");
  train.validate();
}

Annotation oracle_annotate(const QueryBatch& batch, const FeatureStore& store, const ClassSet& known) {
  Annotation out;
  for (SampleId id : batch.ids) {
    const ClassLabel label = store.label(store.require_row(id));
    if (known.contains(label)) {
      out.known_labeled.emplace_back(id, label);
    } else {
      out.invalid.push_back(id);
    }
  }
  return out;
}

void apply_round(PartitionState& state, const Annotation& annotation) {
  auto claim = [&](SampleId id) {
    if (state.labeled.contains(id) || state.invalid.contains(id))
      throw StateError("apply_round: id " + std::to_string(id) + " was already annotated");
    if (!state.pool.contains(id)) throw StateError("apply_round: id " + std::to_string(id) + " is not in the pool");
  };
  std::set<SampleId> batch;
  for (const auto& [id, label] : annotation.known_labeled) {
    claim(id);
    if (!state.known.contains(label))
      throw StateError("apply_round: id " + std::to_string(id) + " annotated with non-known label");
    if (!batch.insert(id).second) throw StateError("apply_round: id " + std::to_string(id) + " repeated");
  }
  for (SampleId id : annotation.invalid) {
    claim(id);
    if (!batch.insert(id).second) throw StateError("apply_round: id " + std::to_string(id) + " repeated");
  }
  for (const auto& [id, label] : annotation.known_labeled) {
    state.pool.erase(id);
    state.labeled.emplace(id, label);
  }
  for (SampleId id : annotation.invalid) {
    state.pool.erase(id);
    state.invalid.insert(id);
  }
}

RoundMetrics compute_metrics(std::span<const RoundReport> previous, std::size_t selected,
                             std::size_t known_selected, std::size_t n_total_known) {
  RoundMetrics m;
  m.precision = selected == 0 ? 0.0 : static_cast<double>(known_selected) / static_cast<double>(selected);
  std::size_t cumulative = known_selected;
  for (const auto& r : previous) cumulative += r.known_selected;
  m.recall_cumulative =
      n_total_known == 0 ? 1.0 : static_cast<double>(cumulative) / static_cast<double>(n_total_known);
  return m;
}

KnnIndex index_for_state(const FeatureStore& store, const PartitionState& state, bool use_invalid_neighbors) {
  KnnIndex index(store.dim());
  for (const auto& [id, label] : state.labeled) index.add(id, label, store.feature(store.require_row(id)));
  if (use_invalid_neighbors) {
    for (SampleId id : state.invalid) index.add(id, kInvalidLabel, store.feature(store.require_row(id)));
  }
  return index;
}

ProtocolRun::ProtocolRun(ProtocolConfig cfg, const FeatureStore& store, const Predictor* external)
    : cfg_(std::move(cfg)), store_(store), external_(external), index_(store.dim() ? store.dim() : 1) {
  try {
    cfg_.validate();
    if (store_.size() == 0) throw ConfigError("protocol: empty feature store");
    for (ClassLabel c : cfg_.known) {
      if (c < 0 || static_cast<std::uint32_t>(c) >= store_.n_classes())
        throw ConfigError("protocol: known class " + std::to_string(c) + " outside the store's classes");
    }
    if (external_ && external_->classes() != cfg_.known)
      throw ConfigError("protocol: external predictions cover a different class set");

    state_ = split_initial(store_, cfg_.known, cfg_.init_fraction, cfg_.test_fraction,
                           stream_seed(cfg_.seed, kSplitStream, 0));
    n_total_known_ = static_cast<std::size_t>(std::count_if(state_.pool.begin(), state_.pool.end(), [&](SampleId id) {
      return cfg_.known.contains(store_.label(store_.require_row(id)));
    }));
    index_ = index_for_state(store_, state_, cfg_.use_invalid_neighbors);
    retrain();
  } catch (const ProtocolError&) {
    throw;
  } catch (const Error& e) {
    throw ProtocolError(0, e.what());
  }
}

const Predictor& ProtocolRun::predictor() const {
  if (external_) return *external_;
  return *model_;
}

void ProtocolRun::retrain() {
  if (external_) return;
  std::vector<LabeledExample> examples;
  examples.reserve(state_.labeled.size());
  for (const auto& [id, label] : state_.labeled)
    examples.push_back({id, store_.feature(store_.require_row(id)), label});
  TrainConfig train = cfg_.train;
  train.seed = stream_seed(cfg_.seed ^ cfg_.train.seed, kTrainStream, reports_.size());
  model_ = train_classifier(examples, cfg_.known, train);
}

double ProtocolRun::test_accuracy() const {
  if (state_.test.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<LabeledExample> test;
  test.reserve(state_.test.size());
  for (SampleId id : state_.test) {
    const auto row = store_.require_row(id);
    test.push_back({id, store_.feature(row), store_.label(row)});
  }
  return evaluate_accuracy(predictor(), test);
}

bool ProtocolRun::truncated() const noexcept {
  return reports_.size() < cfg_.rounds && state_.pool.empty();
}

bool ProtocolRun::step() {
  if (reports_.size() >= cfg_.rounds || state_.pool.empty()) return false;
  const std::size_t round = reports_.size() + 1;
  try {
    const auto pa = assess_pool(store_, state_, index_, cfg_.K, round);
    SelectionContext ctx{store_, state_, index_};
    ctx.predictor = &predictor();
    ctx.K = cfg_.K;
    ctx.budget = cfg_.budget;
    ctx.seed = stream_seed(cfg_.seed, kSelectStream, round);
    ctx.round = round;
    ctx.prefilter = cfg_.prefilter;
    ctx.assessment = &pa;

    const auto batch = select_batch(cfg_.strategy, ctx);
    check_batch(batch, state_, cfg_.budget);

    const auto annotation = oracle_annotate(batch, store_, cfg_.known);
    apply_round(state_, annotation);
    for (const auto& [id, label] : annotation.known_labeled)
      index_.add(id, label, store_.feature(store_.require_row(id)));
    if (cfg_.use_invalid_neighbors) {
      for (SampleId id : annotation.invalid) index_.add(id, kInvalidLabel, store_.feature(store_.require_row(id)));
    }

    RoundReport report;
    report.round = round;
    report.selected = batch.ids.size();
    report.known_selected = annotation.known_labeled.size();
    const auto m = compute_metrics(reports_, report.selected, report.known_selected, n_total_known_);
    report.precision = m.precision;
    report.recall_cumulative = m.recall_cumulative;
    report.labeled_size = state_.labeled.size();
    report.candidate_set_size = pa.candidates.members.size();

    reports_.push_back(report);
    retrain();
    reports_.back().test_accuracy = test_accuracy();
  } catch (const ProtocolError&) {
    throw;
  } catch (const Error& e) {
    throw ProtocolError(round, e.what());
  }
  return true;
}

ProtocolResult run_protocol(const ProtocolConfig& cfg, const FeatureStore& store, const Predictor* external) {
  ProtocolRun run(cfg, store, external);
  while (run.step()) {
  }
  ProtocolResult result;
  result.rounds = run.reports();
  result.truncated = run.truncated();
  result.n_total_known = run.n_total_known();
  result.n_samples = store.size();
  return result;
}

std::string rounds_csv(std::span<const RoundReport> rounds) {
  std::ostringstream out;
  out << kRoundsCsvHeader << '\n';
  for (const auto& r : rounds) {
    out << r.round << ',' << r.selected << ',' << r.known_selected << ',' << csv::format(r.precision) << ','
        << csv::format(r.recall_cumulative) << ',' << csv::format(r.test_accuracy) << ',' << r.labeled_size
        << ',' << r.candidate_set_size << '\n';
  }
  return out.str();
}

std::vector<RoundReport> parse_rounds_csv(std::string_view text, std::string_view source) {
  std::vector<RoundReport> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool header_seen = false;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (line != kRoundsCsvHeader) throw DataError(where + ": unexpected header");
      header_seen = true;
      continue;
    }
    const auto cells = csv::split(line);
    if (cells.size() != 8) throw DataError(where + ": expected 8 columns, got " + std::to_string(cells.size()));
    RoundReport r;
    r.round = csv::parse_uint(cells[0], where);
    r.selected = csv::parse_uint(cells[1], where);
    r.known_selected = csv::parse_uint(cells[2], where);
    r.precision = csv::parse_double(cells[3], where);
    r.recall_cumulative = csv::parse_double(cells[4], where);
    r.test_accuracy = csv::parse_double(cells[5], where);
    r.labeled_size = csv::parse_uint(cells[6], where);
    r.candidate_set_size = csv::parse_uint(cells[7], where);
    out.push_back(r);
  }
  if (!header_seen) throw DataError(std::string(source) + ": empty rounds file");
  return out;
}

}  // namespace aosa
