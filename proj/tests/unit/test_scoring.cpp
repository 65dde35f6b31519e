#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "aosa/errors.hpp"
#include "aosa/scoring.hpp"
#include "oracles.hpp"

using namespace aosa;
namespace at = aosa::testing;

namespace {

NeighborList list_of(std::initializer_list<ClassLabel> labels) {
  NeighborList nl;
  SampleId id = 0;
  for (ClassLabel l : labels) nl.neighbors.push_back({id++, l, 0.0});
  return nl;
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t C) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> p(C);
  double s = 0.0;
  for (auto& x : p) s += (x = ex(rng));
  for (auto& x : p) x /= s;
  return p;
}

std::vector<double> random_counts(std::mt19937_64& rng, std::size_t C, int K) {
  std::vector<double> v(C, 0.0);
  for (int k = 0; k < K; ++k) v[rng() % C] += 1.0;
  return v;
}

}  // namespace

TEST(Histogram, Examples) {
  EXPECT_EQ(neighbor_histogram(list_of({0, 0, 0, 0}), ClassSet::range(2)), (std::vector<int>{4, 0}));
  EXPECT_EQ(neighbor_histogram(list_of({0, 1, 1, 2}), ClassSet::range(3)), (std::vector<int>{1, 2, 1}));
  EXPECT_EQ(neighbor_histogram(NeighborList{}, ClassSet::range(3)), (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(neighbor_histogram(list_of({7, 3, 7}), ClassSet{3, 7}), (std::vector<int>{1, 2}));
  EXPECT_THROW(neighbor_histogram(list_of({0, 2}), ClassSet::range(2)), ContractViolation);
  EXPECT_THROW(neighbor_histogram(list_of({0, -1}), ClassSet::range(2)), ContractViolation);
  EXPECT_EQ(known_neighbor_histogram(list_of({0, -1, 1, 5}), ClassSet::range(2)), (std::vector<int>{1, 1}));
}

TEST(Softmax, Examples) {
  const auto half = softmax_normalize(std::vector<int>{2, 2});
  EXPECT_DOUBLE_EQ(half[0], 0.5);
  EXPECT_DOUBLE_EQ(half[1], 0.5);
  const auto s = softmax_normalize(std::vector<int>{4, 0});
  EXPECT_NEAR(s[0], 0.98201379003790844, 1e-14);
  EXPECT_NEAR(s[1], 0.01798620996209156, 1e-14);
  const auto big = softmax_normalize(std::vector<double>{1000.0, 0.0});
  EXPECT_TRUE(std::isfinite(big[0]));
  EXPECT_DOUBLE_EQ(big[0], 1.0);
  EXPECT_NEAR(big[1], std::exp(-1000.0), 1e-300);
  EXPECT_GE(big[1], 0.0);
}

TEST(Softmax, ArgmaxPreservedAndPositive) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto v = random_counts(rng, 2 + rng() % 8, 1 + static_cast<int>(rng() % 20));
    const auto s = softmax_normalize(v);
    EXPECT_NEAR(std::accumulate(s.begin(), s.end(), 0.0), 1.0, 1e-9);
    for (double x : s) EXPECT_GT(x, 0.0);
    EXPECT_EQ(std::max_element(s.begin(), s.end()) - s.begin(), std::max_element(v.begin(), v.end()) - v.begin());
    const auto o = at::oracle_softmax(v);
    for (std::size_t c = 0; c < v.size(); ++c) EXPECT_NEAR(s[c], static_cast<double>(o[c]), 1e-14);
  }
}

TEST(Inconsistency, Examples) {
  const std::vector<double> v22{2, 2}, v40{4, 0}, v04{0, 4};
  EXPECT_NEAR(inconsistency_score(std::vector<double>{0.3, 0.7}, v22), 0.69314718055994531, 1e-12);
  EXPECT_NEAR(inconsistency_score(std::vector<double>{1, 0}, v40), 0.01814992791780974, 1e-12);
  EXPECT_NEAR(inconsistency_score(std::vector<double>{1, 0}, v04), 4.01814992791780974, 1e-12);
  EXPECT_THROW(inconsistency_score(std::vector<double>{1, 0, 0}, v22), ContractViolation);
}

TEST(Inconsistency, ClosedFormAndOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t C = 2 + rng() % 9;
    const int K = 1 + static_cast<int>(rng() % 20);
    const auto p = random_simplex(rng, C);
    const auto v = random_counts(rng, C, K);
    const double got = inconsistency_score(p, v);
    const double dot = std::inner_product(p.begin(), p.end(), v.begin(), 0.0);
    EXPECT_NEAR(got, log_sum_exp(v) - dot, 1e-9);
    EXPECT_NEAR(got, static_cast<double>(at::oracle_inconsistency(p, v)), 1e-9);
    EXPECT_NEAR(log_sum_exp(v), static_cast<double>(at::oracle_log_sum_exp(v)), 1e-12);
    EXPECT_GE(got, 0.0);
  }
}

TEST(Inconsistency, ShiftInvariant) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t C = 2 + rng() % 6;
    const auto p = random_simplex(rng, C);
    auto v = random_counts(rng, C, 10);
    const double base = inconsistency_score(p, v);
    for (auto& x : v) x += 7.0;
    EXPECT_NEAR(inconsistency_score(p, v), base, 1e-9);
  }
}

TEST(Inconsistency, MinimizedByOneHotAtArgmax) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const std::size_t C = 2 + rng() % 6;
    const auto v = random_counts(rng, C, 12);
    const std::size_t best = std::max_element(v.begin(), v.end()) - v.begin();
    std::vector<double> onehot(C, 0.0);
    onehot[best] = 1.0;
    const double floor_score = inconsistency_score(onehot, v);
    for (std::size_t c = 0; c < C; ++c) {
      std::vector<double> e(C, 0.0);
      e[c] = 1.0;
      EXPECT_GE(inconsistency_score(e, v), floor_score - 1e-12);
    }
    for (int k = 0; k < 5; ++k) EXPECT_GE(inconsistency_score(random_simplex(rng, C), v), floor_score - 1e-12);
  }
}

TEST(Entropy, Examples) {
  EXPECT_EQ(entropy(std::vector<double>{0, 1, 0}), 0.0);
  EXPECT_NEAR(entropy(std::vector<double>(5, 0.2)), std::log(5.0), 1e-12);
  EXPECT_NEAR(entropy(std::vector<double>{0.9, 0.1}), 0.32508297339144824, 1e-12);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto p = random_simplex(rng, 2 + rng() % 8);
    EXPECT_NEAR(entropy(p), static_cast<double>(at::oracle_entropy(p)), 1e-12);
  }
}

TEST(ScoreRecord, Invariants) {
  const auto rec = score_candidate(9, {0.25, 0.75}, list_of({0, 0, 1}), ClassSet::range(2));
  EXPECT_EQ(rec.id, 9u);
  EXPECT_EQ(rec.counts, (std::vector<int>{2, 1}));
  EXPECT_NEAR(rec.normalized_counts[0] + rec.normalized_counts[1], 1.0, 1e-12);
  EXPECT_NEAR(rec.score, log_sum_exp(std::vector<double>{2, 1}) - (0.25 * 2 + 0.75 * 1), 1e-12);
  EXPECT_EQ(rec.prediction, (std::vector<double>{0.25, 0.75}));
}
