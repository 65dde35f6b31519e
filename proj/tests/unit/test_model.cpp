#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "aosa/errors.hpp"
#include "aosa/model.hpp"
#include "aosa/synthetic.hpp"
#include "oracles.hpp"

using namespace aosa;
namespace at = aosa::testing;

namespace {

struct Data {
  std::vector<std::vector<float>> x;
  std::vector<ClassLabel> y;
  std::vector<LabeledExample> examples() const {
    std::vector<LabeledExample> out;
    for (std::size_t i = 0; i < x.size(); ++i) out.push_back({i, x[i], y[i]});
    return out;
  }
};

// Two Gaussian blobs in `dim` dimensions, centers +-(sep/2) * e_0.
Data blobs(std::size_t n, std::size_t dim, double sep, double sigma, std::uint64_t seed,
           std::vector<ClassLabel> labels = {0, 1}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % labels.size();
    std::vector<float> x(dim);
    for (auto& v : x) v = static_cast<float>(g(rng));
    x[0] += static_cast<float>((c == 0 ? -0.5 : 0.5) * sep);
    d.x.push_back(x);
    d.y.push_back(labels[c]);
  }
  return d;
}

double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-300});
}

class Fixed final : public Predictor {
 public:
  Fixed(ClassSet c, std::vector<double> p) : c_(std::move(c)), p_(std::move(p)) {}
  std::vector<double> predict(SampleId, std::span<const float>) const override { return p_; }
  const ClassSet& classes() const override { return c_; }

 private:
  ClassSet c_;
  std::vector<double> p_;
};

}  // namespace

TEST(Classifier, ZeroModelIsUniform) {
  Classifier clf({2, 5, 9}, 4);
  const auto p = clf.predict_proba(std::vector<float>{0.1f, 0.2f, 0.3f, 0.4f});
  for (double v : p) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
  EXPECT_THROW(clf.predict_proba(std::vector<float>{1, 2}), ContractViolation);
}

TEST(Classifier, OutputsAreProbabilities) {
  std::mt19937_64 rng(1);
  Classifier clf(ClassSet::range(4), 6);
  std::normal_distribution<double> g(0.0, 3.0);
  for (auto& w : clf.weights()) w = g(rng);
  for (auto& b : clf.bias()) b = g(rng);
  for (int t = 0; t < 1000; ++t) {
    const auto p = clf.predict_proba(at::random_unit(rng, 6));
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
    for (double v : p) EXPECT_GT(v, 0.0);
  }
}

TEST(Classifier, GradientMatchesFiniteDifferences) {
  const auto d = blobs(10, 5, 1.0, 1.0, 2, {0, 1, 2});
  const auto ex = d.examples();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  const double h = 1e-6;
  for (int point = 0; point < 20; ++point) {
    Classifier clf({0, 1, 2}, 5);
    for (auto& w : clf.weights()) w = g(rng);
    for (auto& b : clf.bias()) b = g(rng);
    const auto analytic = cross_entropy_gradient(clf, ex);

    std::vector<double> num_w(clf.weights().size()), num_b(clf.bias().size());
    auto central = [&](double& param) {
      const double keep = param;
      param = keep + h;
      const double up = cross_entropy_loss(clf, ex);
      param = keep - h;
      const double down = cross_entropy_loss(clf, ex);
      param = keep;
      return (up - down) / (2 * h);
    };
    for (std::size_t i = 0; i < num_w.size(); ++i) num_w[i] = central(clf.weights()[i]);
    for (std::size_t i = 0; i < num_b.size(); ++i) num_b[i] = central(clf.bias()[i]);
    EXPECT_LE(rel_err(analytic.weights, num_w), 1e-5) << "point " << point;
    EXPECT_LE(rel_err(analytic.bias, num_b), 1e-5) << "point " << point;
  }
}

TEST(Training, SeparableBlobsReachPerfectAccuracy) {
  const auto d = blobs(200, 4, 10.0 * 0.3, 0.3, 4);
  // Threshold oracle: the first coordinate splits the classes at 0.
  for (std::size_t i = 0; i < d.x.size(); ++i) ASSERT_EQ(d.x[i][0] > 0.0f, d.y[i] == 1) << "not separable";
  const auto ex = d.examples();
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  const auto clf = train_classifier(ex, {0, 1}, cfg);
  EXPECT_DOUBLE_EQ(evaluate_accuracy(clf, ex), 1.0);
  EXPECT_LE(clf.train_log().back(), clf.train_log().front());
  EXPECT_EQ(clf.train_log().size(), cfg.epochs);
  const std::vector<float> deep{1.5f, 0, 0, 0};
  const auto p = clf.predict_proba(deep);
  EXPECT_GT(p[1], p[0]);
}

TEST(Training, DuplicatedDataSameDecisions) {
  const auto d = blobs(60, 3, 1.5, 0.6, 5);
  auto dd = d;
  dd.x.insert(dd.x.end(), d.x.begin(), d.x.end());
  dd.y.insert(dd.y.end(), d.y.begin(), d.y.end());
  TrainConfig cfg;
  cfg.batch_size = 1000;
  cfg.learning_rate = 1.0;
  cfg.epochs = 200;
  const auto a = train_classifier(d.examples(), {0, 1}, cfg);
  const auto b = train_classifier(dd.examples(), {0, 1}, cfg);
  std::size_t disagree = 0;
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j) {
      const std::vector<float> probe{i * 0.1f, j * 0.1f, 0.05f};
      const auto pa = a.predict_proba(probe), pb = b.predict_proba(probe);
      disagree += (pa[1] > pa[0]) != (pb[1] > pb[0]);
    }
  EXPECT_EQ(disagree, 0u);
}

TEST(Training, DeterministicGivenSeed) {
  const auto d = blobs(80, 4, 1.0, 0.8, 6);
  TrainConfig cfg;
  cfg.seed = 42;
  cfg.batch_size = 16;
  const auto a = train_classifier(d.examples(), {0, 1}, cfg);
  const auto b = train_classifier(d.examples(), {0, 1}, cfg);
  EXPECT_EQ(a.weights(), b.weights());
  EXPECT_EQ(a.bias(), b.bias());
  cfg.seed = 43;
  EXPECT_NE(train_classifier(d.examples(), {0, 1}, cfg).weights(), a.weights());
}

TEST(Training, ConvexObjectiveSeedsAgree) {
  const auto d = blobs(40, 3, 1.0, 1.0, 7);
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.epochs = 400;
  cfg.decay_every = 100;
  cfg.batch_size = 8;
  cfg.seed = 1;
  const double a = train_classifier(d.examples(), {0, 1}, cfg).train_log().back();
  cfg.seed = 2;
  const double b = train_classifier(d.examples(), {0, 1}, cfg).train_log().back();
  EXPECT_NEAR(a, b, 1e-3);
}

TEST(Training, Errors) {
  const auto d = blobs(10, 2, 1.0, 1.0, 8);
  const auto ex = d.examples();
  EXPECT_THROW(train_classifier(ex, {0}, {}), ConfigError);
  try {
    train_classifier(ex, {0, 1, 4}, {});
    FAIL();
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("class 4"), std::string::npos) << e.what();
  }
  auto bad = ex;
  bad[0].label = 3;
  EXPECT_THROW(train_classifier(bad, {0, 1}, {}), TrainingError);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(train_classifier(ex, {0, 1}, cfg), ConfigError);
  cfg = {};
  cfg.lr_decay = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(TrainConfig, StepSchedule) {
  TrainConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.rate_at(0), 0.01);
  EXPECT_DOUBLE_EQ(cfg.rate_at(19), 0.01);
  EXPECT_DOUBLE_EQ(cfg.rate_at(20), 0.005);
  EXPECT_DOUBLE_EQ(cfg.rate_at(45), 0.0025);
}

TEST(Accuracy, ConstantPredictor) {
  const Fixed always0({0, 1}, {0.9, 0.1});
  const std::vector<float> f{1, 0};
  std::vector<LabeledExample> all0{{0, f, 0}, {1, f, 0}};
  std::vector<LabeledExample> balanced{{0, f, 0}, {1, f, 1}, {2, f, 0}, {3, f, 1}};
  EXPECT_DOUBLE_EQ(evaluate_accuracy(always0, all0), 1.0);
  EXPECT_DOUBLE_EQ(evaluate_accuracy(always0, balanced), 0.5);
  EXPECT_THROW(evaluate_accuracy(always0, {}), ConfigError);
}

TEST(ExternalPredictions, ParsesAndValidates) {
  at::TempDir dir("ext");
  const ClassSet c{0, 1};
  at::spit(dir / "ok.csv", "id,p_0,p_1\n7,0.6,0.4\n8,0.3,0.7005\n");
  const auto ep = load_external_predictions(dir / "ok.csv", c);
  EXPECT_EQ(ep.predict(7, {}), (std::vector<double>{0.6, 0.4}));
  const auto p8 = ep.predict(8, {});
  EXPECT_NEAR(p8[0] + p8[1], 1.0, 1e-12);
  EXPECT_THROW(ep.predict(9, {}), DataError);

  at::spit(dir / "sum.csv", "7,0.6,0.5\n");
  try {
    load_external_predictions(dir / "sum.csv", c);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
  at::spit(dir / "wide.csv", "7,0.2,0.3,0.5\n");
  EXPECT_THROW(load_external_predictions(dir / "wide.csv", c), SchemaError);
  at::spit(dir / "dup.csv", "7,0.5,0.5\n7,0.5,0.5\n");
  EXPECT_THROW(load_external_predictions(dir / "dup.csv", c), DataError);

  const auto store = FeatureStore::from_records({{7, 0, {1, 0}}}, 2, 2);
  at::spit(dir / "unknown.csv", "7,0.5,0.5\n12,0.5,0.5\n");
  EXPECT_THROW(load_external_predictions(dir / "unknown.csv", c, &store), DataError);
  EXPECT_THROW(load_external_predictions(dir / "missing.csv", c), ConfigError);
}
