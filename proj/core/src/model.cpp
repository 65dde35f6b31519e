#include "aosa/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "aosa/errors.hpp"
#include "aosa/random.hpp"

namespace aosa {
namespace {

void softmax_inplace(std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (auto& v : z) v /= sum;
}

std::size_t output_of(const ClassSet& classes, ClassLabel label) {
  auto idx = classes.index_of(label);
  if (!idx) throw ContractViolation("label " + std::to_string(label) + " is not a known class");
  return *idx;
}

// Accumulates the summed (not averaged) loss and gradient of `batch`.
double accumulate(const Classifier& model, std::span<const LabeledExample> examples,
                  std::span<const std::size_t> batch, std::vector<double>& gw, std::vector<double>& gb) {
  const std::size_t dim = model.dim();
  double loss = 0.0;
  for (std::size_t i : batch) {
    const auto& ex = examples[i];
    auto p = model.logits(ex.feature);
    softmax_inplace(p);
    const std::size_t y = output_of(model.classes(), ex.label);
    loss -= std::log(std::max(p[y], std::numeric_limits<double>::min()));
    p[y] -= 1.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
      double* row = gw.data() + c * dim;
      for (std::size_t d = 0; d < dim; ++d) row[d] += p[c] * ex.feature[d];
      gb[c] += p[c];
    }
  }
  return loss;
}

void check_dim(const Classifier& model, std::span<const float> feature) {
  if (feature.size() != model.dim())
    throw ContractViolation("classifier: feature length " + std::to_string(feature.size()) +
                            " != dim " + std::to_string(model.dim()));
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train config: epochs must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("train config: learning_rate must be > 0");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ConfigError("train config: lr_decay must lie in (0, 1]");
  if (decay_every < 1) throw ConfigError("train config: decay_every must be >= 1");
  if (batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
}

double TrainConfig::rate_at(std::size_t epoch) const {
  return learning_rate * std::pow(lr_decay, static_cast<double>(epoch / decay_every));
}

Classifier::Classifier(ClassSet classes, std::uint32_t dim)
    : classes_(std::move(classes)),
      dim_(dim),
      weights_(classes_.size() * dim, 0.0),
      bias_(classes_.size(), 0.0) {
  if (classes_.empty()) throw ConfigError("classifier: no classes");
  if (dim == 0) throw ConfigError("classifier: dim must be positive");
}

std::vector<double> Classifier::logits(std::span<const float> feature) const {
  check_dim(*this, feature);
  std::vector<double> z(bias_);
  for (std::size_t c = 0; c < z.size(); ++c) {
    const double* row = weights_.data() + c * dim_;
    double acc = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) acc += row[d] * feature[d];
    z[c] += acc;
  }
  return z;
}

std::vector<double> Classifier::predict_proba(std::span<const float> feature) const {
  auto z = logits(feature);
  softmax_inplace(z);
  return z;
}

std::vector<double> Classifier::predict(SampleId, std::span<const float> feature) const {
  return predict_proba(feature);
}

std::vector<double> predict_proba(const Classifier& model, std::span<const float> feature) {
  return model.predict_proba(feature);
}

double cross_entropy_loss(const Classifier& model, std::span<const LabeledExample> examples) {
  if (examples.empty()) return 0.0;
  double loss = 0.0;
  for (const auto& ex : examples) {
    const auto p = model.predict_proba(ex.feature);
    loss -= std::log(std::max(p[output_of(model.classes(), ex.label)], std::numeric_limits<double>::min()));
  }
  return loss / static_cast<double>(examples.size());
}

Gradient cross_entropy_gradient(const Classifier& model, std::span<const LabeledExample> examples) {
  Gradient g{std::vector<double>(model.weights().size(), 0.0), std::vector<double>(model.bias().size(), 0.0)};
  if (examples.empty()) return g;
  std::vector<std::size_t> all(examples.size());
  std::iota(all.begin(), all.end(), 0);
  accumulate(model, examples, all, g.weights, g.bias);
  const double inv = 1.0 / static_cast<double>(examples.size());
  for (auto& v : g.weights) v *= inv;
  for (auto& v : g.bias) v *= inv;
  return g;
}

Classifier train_classifier(std::span<const LabeledExample> examples, const ClassSet& classes,
                            const TrainConfig& cfg) {
  cfg.validate();
  if (classes.size() < 2) throw ConfigError("train_classifier: need at least 2 known classes");
  if (examples.empty()) throw TrainingError("train_classifier: no labeled examples");

  std::vector<std::size_t> per_class(classes.size(), 0);
  for (const auto& ex : examples) {
    auto idx = classes.index_of(ex.label);
    if (!idx) throw TrainingError("train_classifier: example " + std::to_string(ex.id) +
                                  " has label " + std::to_string(ex.label) + " outside the known classes");
    ++per_class[*idx];
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (per_class[c] == 0)
      throw TrainingError("train_classifier: known class " + std::to_string(classes.at(c)) +
                          " has no labeled examples");
  }

  const auto dim = static_cast<std::uint32_t>(examples.front().feature.size());
  Classifier model(classes, dim);
  Rng rng(cfg.seed);
  std::normal_distribution<double> init(0.0, 0.01);
  for (auto& w : model.weights_) w = init(rng);

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> gw(model.weights_.size());
  std::vector<double> gb(model.bias_.size());

  model.train_log_.reserve(cfg.epochs);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double lr = cfg.rate_at(epoch);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::fill(gw.begin(), gw.end(), 0.0);
      std::fill(gb.begin(), gb.end(), 0.0);
      accumulate(model, examples, std::span<const std::size_t>(order).subspan(start, stop - start), gw, gb);
      const double step = lr / static_cast<double>(stop - start);
      for (std::size_t i = 0; i < gw.size(); ++i) model.weights_[i] -= step * gw[i];
      for (std::size_t i = 0; i < gb.size(); ++i) model.bias_[i] -= step * gb[i];
    }
    model.train_log_.push_back(cross_entropy_loss(model, examples));
  }
  return model;
}

double evaluate_accuracy(const Predictor& predictor, std::span<const LabeledExample> test) {
  if (test.empty()) throw ConfigError("evaluate_accuracy: empty test set");
  std::size_t correct = 0;
  for (const auto& ex : test) {
    const auto p = predictor.predict(ex.id, ex.feature);
    const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    if (predictor.classes().at(best) == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

ExternalPredictions::ExternalPredictions(ClassSet classes, std::map<SampleId, std::vector<double>> table)
    : classes_(std::move(classes)), table_(std::move(table)) {}

std::vector<double> ExternalPredictions::predict(SampleId id, std::span<const float>) const {
  auto it = table_.find(id);
  if (it == table_.end()) throw DataError("external predictions: no row for sample " + std::to_string(id));
  return it->second;
}

ExternalPredictions load_external_predictions(const std::filesystem::path& path, const ClassSet& classes,
                                              const FeatureStore* store) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open external predictions: " + path.string());

  std::map<SampleId, std::vector<double>> table;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (row == 1 && line.rfind("id", 0) == 0) continue;

    const std::string where = path.string() + " row " + std::to_string(row);
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != classes.size() + 1)
      throw SchemaError(where + ": expected " + std::to_string(classes.size() + 1) + " columns, got " +
                        std::to_string(cells.size()));

    auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
    };
    for (auto& c : cells) trim(c);

    SampleId id = 0;
    auto [ptr, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), id);
    if (ec != std::errc() || ptr != cells[0].data() + cells[0].size())
      throw DataError(where + ": bad id '" + cells[0] + "'");

    std::vector<double> p(classes.size());
    double sum = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
      const auto& cell = cells[c + 1];
      auto [pp, pec] = std::from_chars(cell.data(), cell.data() + cell.size(), p[c]);
      if (pec != std::errc() || pp != cell.data() + cell.size() || !std::isfinite(p[c]) || p[c] < 0.0)
        throw DataError(where + ": bad probability '" + cell + "'");
      sum += p[c];
    }
    if (std::abs(sum - 1.0) > kPredictionSumTolerance)
      throw DataError(where + ": probabilities sum to " + std::to_string(sum));
    for (auto& v : p) v /= sum;

    if (store && !store->row_of(id)) throw DataError(where + ": unknown sample id " + std::to_string(id));
    if (!table.emplace(id, std::move(p)).second)
      throw DataError(where + ": duplicate sample id " + std::to_string(id));
  }
  return ExternalPredictions(classes, std::move(table));
}

}  // namespace aosa
