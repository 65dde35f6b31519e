#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "aosa/classes.hpp"
#include "aosa/feature_store.hpp"
#include "aosa/types.hpp"

namespace aosa {

/// Source of per-sample class-probability vectors over the known classes.
class Predictor {
 public:
  virtual ~Predictor() = default;

  /// Probabilities ordered like `classes()`.
  virtual std::vector<double> predict(SampleId id, std::span<const float> feature) const = 0;
  virtual const ClassSet& classes() const = 0;
};

/// Mini-batch SGD schedule. Defaults follow the usual 100-epoch recipe:
/// lr 0.01 halved every 20 epochs, batches of 128.
struct TrainConfig {
  std::size_t epochs = 100;
  double learning_rate = 0.01;
  double lr_decay = 0.5;
  std::size_t decay_every = 20;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;

  void validate() const;
  double rate_at(std::size_t epoch) const;
};

struct LabeledExample {
  SampleId id = 0;
  std::span<const float> feature;
  ClassLabel label = 0;
};

/// Multinomial logistic regression: softmax(W x + b) over the known classes.
class Classifier final : public Predictor {
 public:
  /// Zero weights and bias.
  Classifier(ClassSet classes, std::uint32_t dim);

  std::vector<double> predict(SampleId id, std::span<const float> feature) const override;
  const ClassSet& classes() const override { return classes_; }

  std::vector<double> predict_proba(std::span<const float> feature) const;
  std::vector<double> logits(std::span<const float> feature) const;

  std::uint32_t dim() const noexcept { return dim_; }
  std::size_t n_outputs() const noexcept { return classes_.size(); }

  /// Row-major n_outputs x dim.
  std::vector<double>& weights() noexcept { return weights_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::vector<double>& bias() noexcept { return bias_; }
  const std::vector<double>& bias() const noexcept { return bias_; }

  /// Mean training loss over the full labeled set after each epoch.
  const std::vector<double>& train_log() const noexcept { return train_log_; }

 private:
  friend Classifier train_classifier(std::span<const LabeledExample>, const ClassSet&, const TrainConfig&);

  ClassSet classes_;
  std::uint32_t dim_;
  std::vector<double> weights_;
  std::vector<double> bias_;
  std::vector<double> train_log_;
};

struct Gradient {
  std::vector<double> weights;
  std::vector<double> bias;
};

/// Mean softmax cross-entropy of `model` over `examples`.
double cross_entropy_loss(const Classifier& model, std::span<const LabeledExample> examples);

/// Analytic gradient of cross_entropy_loss with respect to (W, b).
Gradient cross_entropy_gradient(const Classifier& model, std::span<const LabeledExample> examples);

/// Fresh small-Gaussian initialization from `cfg.seed`, then SGD. Needs at
/// least two classes and at least one example of each.
Classifier train_classifier(std::span<const LabeledExample> examples, const ClassSet& classes,
                            const TrainConfig& cfg);

std::vector<double> predict_proba(const Classifier& model, std::span<const float> feature);

/// Fraction of argmax-correct predictions. Empty input is a ConfigError.
double evaluate_accuracy(const Predictor& predictor, std::span<const LabeledExample> test);

/// Probability vectors computed elsewhere (e.g. a full image network),
/// keyed by sample id.
class ExternalPredictions final : public Predictor {
 public:
  ExternalPredictions(ClassSet classes, std::map<SampleId, std::vector<double>> table);

  std::vector<double> predict(SampleId id, std::span<const float> feature) const override;
  const ClassSet& classes() const override { return classes_; }

  const std::map<SampleId, std::vector<double>>& table() const noexcept { return table_; }

 private:
  ClassSet classes_;
  std::map<SampleId, std::vector<double>> table_;
};

inline constexpr double kPredictionSumTolerance = 1e-3;

/// CSV rows `id,p_0,...,p_{C-1}` with an optional header starting with
/// "id". Rows summing within 1e-3 of one are renormalized; others are a
/// DataError naming the row. Column count != C+1 is a SchemaError. When
/// `store` is given, ids missing from it are a DataError.
ExternalPredictions load_external_predictions(const std::filesystem::path& path, const ClassSet& classes,
                                              const FeatureStore* store = nullptr);

}  // namespace aosa
