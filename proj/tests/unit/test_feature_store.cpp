#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "aosa/errors.hpp"
#include "aosa/feature_store.hpp"
#include "aosa/knn_index.hpp"
#include "aosa/partition.hpp"
#include "aosa/synthetic.hpp"
#include "oracles.hpp"

using namespace aosa;
using aosa::testing::TempDir;

namespace {

double norm_of(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

template <typename T>
void put(std::vector<std::byte>& out, T v) {
  const auto* p = reinterpret_cast<const std::byte*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

std::vector<std::byte> header(std::uint64_t n, std::uint32_t dim, std::uint32_t n_classes, std::uint32_t version = 1) {
  std::vector<std::byte> out;
  for (char c : {'A', 'O', 'S', 'A'}) out.push_back(static_cast<std::byte>(c));
  put(out, version);
  put(out, n);
  put(out, dim);
  put(out, n_classes);
  return out;
}

void record(std::vector<std::byte>& out, std::uint64_t id, std::int32_t label, std::vector<float> f) {
  put(out, id);
  put(out, label);
  for (float x : f) put(out, x);
}

}  // namespace

TEST(FeatureStore, JsonlFixtureNormalizes) {
  TempDir dir("jsonl");
  aosa::testing::spit(dir / "f.jsonl",
                      "{\"id\": 1, \"label\": 0, \"feature\": [3, 0, 4]}\n"
                      "{\"id\": 2, \"label\": 1, \"feature\": [0, 2, 0]}\n");
  const auto store = load_feature_store(dir / "f.jsonl");
  EXPECT_EQ(store.size(), 2u);
  EXPECT_EQ(store.dim(), 3u);
  EXPECT_EQ(store.n_classes(), 2u);
  for (std::size_t r = 0; r < store.size(); ++r) EXPECT_NEAR(norm_of(store.feature(r)), 1.0, 1e-6);
  EXPECT_FLOAT_EQ(store.feature(0)[0], 0.6f);
  EXPECT_FLOAT_EQ(store.feature(0)[2], 0.8f);
}

TEST(FeatureStore, HeaderCountMismatchIsSchemaError) {
  auto bytes = header(5, 2, 2);
  for (std::uint64_t i = 0; i < 4; ++i) record(bytes, i, 0, {1.0f, 0.0f});
  EXPECT_THROW(parse_feature_store(bytes), SchemaError);
}

TEST(FeatureStore, ZeroNormNamesId) {
  auto bytes = header(2, 3, 1);
  record(bytes, 10, 0, {1, 0, 0});
  record(bytes, 11, 0, {0, 0, 0});
  try {
    parse_feature_store(bytes);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("11"), std::string::npos) << e.what();
  }
}

TEST(FeatureStore, BadMagicAndVersion) {
  auto bytes = header(0, 2, 1);
  bytes[0] = std::byte{'X'};
  EXPECT_THROW(parse_feature_store(bytes), FormatError);
  auto v2 = header(0, 2, 1, 2);
  EXPECT_THROW(parse_feature_store(v2), FormatError);
}

TEST(FeatureStore, RaggedDimensionIsSchemaError) {
  std::vector<SampleRecord> recs{{0, 0, {1, 0}}, {1, 0, {1, 0, 0}}};
  EXPECT_THROW(FeatureStore::from_records(recs, 2, 1), SchemaError);
  TempDir dir("ragged");
  aosa::testing::spit(dir / "r.jsonl",
                      "{\"id\": 0, \"label\": 0, \"feature\": [1, 0]}\n"
                      "{\"id\": 1, \"label\": 0, \"feature\": [1, 0, 0]}\n");
  EXPECT_THROW(load_feature_store(dir / "r.jsonl"), SchemaError);
}

TEST(FeatureStore, DuplicateIdsAndBadLabels) {
  EXPECT_THROW(FeatureStore::from_records({{3, 0, {1, 0}}, {3, 0, {0, 1}}}, 2, 1), SchemaError);
  EXPECT_THROW(FeatureStore::from_records({{3, 2, {1, 0}}}, 2, 2), SchemaError);
  EXPECT_THROW(FeatureStore::from_records({{3, 0, {NAN, 0}}}, 2, 1), DataError);
}

TEST(FeatureStore, SortsByIdAndLooksUpRows) {
  const auto s = FeatureStore::from_records({{9, 1, {0, 1}}, {2, 0, {1, 0}}}, 2, 2);
  EXPECT_EQ(s.id(0), 2u);
  EXPECT_EQ(s.id(1), 9u);
  EXPECT_EQ(s.label(1), 1);
  EXPECT_EQ(s.row_of(9), 1u);
  EXPECT_FALSE(s.row_of(5).has_value());
  EXPECT_THROW(s.require_row(5), DataError);
}

TEST(FeatureStore, BinaryRoundTripIsBitExact) {
  std::mt19937_64 rng(7);
  std::normal_distribution<float> g;
  std::vector<SampleRecord> recs;
  for (std::uint64_t i = 0; i < 200; ++i) {
    std::vector<float> f(13);
    for (auto& x : f) x = g(rng) * 5.0f;
    recs.push_back({i * 3 + 1, static_cast<ClassLabel>(i % 4), f});
  }
  const auto store = FeatureStore::from_records(recs, 13, 4);
  const auto again = parse_feature_store(serialize_feature_store(store));
  EXPECT_TRUE(again == store);
  for (std::size_t r = 0; r < store.size(); ++r)
    EXPECT_EQ(std::memcmp(again.feature(r).data(), store.feature(r).data(), 13 * sizeof(float)), 0);

  TempDir dir("bin");
  save_feature_store(store, dir / "s.aosa");
  EXPECT_TRUE(load_feature_store(dir / "s.aosa") == store);
}

TEST(FeatureStore, SerializedLayoutIsLittleEndian) {
  const auto store = FeatureStore::from_records({{258, 1, {1, 0}}}, 2, 2);
  const auto bytes = serialize_feature_store(store);
  ASSERT_EQ(bytes.size(), 4u + 4 + 8 + 4 + 4 + 8 + 4 + 8);
  EXPECT_EQ(static_cast<char>(bytes[0]), 'A');
  EXPECT_EQ(static_cast<unsigned>(bytes[4]), 1u);
  EXPECT_EQ(static_cast<unsigned>(bytes[8]), 1u);
  EXPECT_EQ(static_cast<unsigned>(bytes[24]), 2u);
  EXPECT_EQ(static_cast<unsigned>(bytes[25]), 1u);
}

TEST(Synthetic, PureClustersWithoutFlips) {
  SyntheticSpec spec;
  spec.n_clusters = 2;
  spec.known_clusters = 1;
  spec.per_cluster = 50;
  spec.cluster_separation = 10.0;
  spec.noise_sigma = 0.01;
  const auto ds = generate_synthetic_dataset(spec);
  ASSERT_EQ(ds.store.size(), 100u);
  EXPECT_EQ(ds.flipped, 0u);
  for (std::size_t r = 0; r < ds.store.size(); ++r) EXPECT_EQ(ds.store.label(r), ds.true_cluster[r]);
}

TEST(Synthetic, FlipRateWithinThreeStandardErrors) {
  SyntheticSpec spec;
  spec.n_clusters = 5;
  spec.per_cluster = 2000;
  spec.label_flip_rate = 0.1;
  spec.seed = 11;
  const auto ds = generate_synthetic_dataset(spec);
  std::size_t flips = 0;
  for (std::size_t r = 0; r < ds.store.size(); ++r) flips += ds.store.label(r) != ds.true_cluster[r];
  EXPECT_EQ(flips, ds.flipped);
  const double n = static_cast<double>(ds.store.size());
  const double se = std::sqrt(0.1 * 0.9 / n);
  EXPECT_NEAR(flips / n, 0.1, 3 * se);
}

TEST(Synthetic, DeterministicInSeed) {
  SyntheticSpec spec;
  spec.seed = 5;
  EXPECT_TRUE(generate_synthetic(spec) == generate_synthetic(spec));
  auto other = spec;
  other.seed = 6;
  EXPECT_FALSE(generate_synthetic(spec) == generate_synthetic(other));
}

TEST(Synthetic, ValidationNamesField) {
  SyntheticSpec spec;
  spec.label_flip_rate = 0.5;
  try {
    spec.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("label_flip_rate"), std::string::npos);
  }
  spec = {};
  spec.known_clusters = 7;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = {};
  spec.cluster_separation = 0.0;
  EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(Synthetic, ClusterabilitySlackUnderTarget) {
  SyntheticSpec spec;
  spec.n_clusters = 6;
  spec.per_cluster = 100;
  spec.dim = 16;
  spec.cluster_separation = 1.0;
  spec.noise_sigma = 0.15;
  spec.sigma_K = 0.02;
  spec.seed = 3;
  const auto ds = generate_synthetic_dataset(spec);
  const double slack = clusterability_slack(ds.store, ds.true_cluster, 10);
  EXPECT_LE(slack, spec.sigma_K);

  auto noisy = spec;
  noisy.noise_sigma = 0.6;
  const auto nds = generate_synthetic_dataset(noisy);
  EXPECT_GT(clusterability_slack(nds.store, nds.true_cluster, 10), slack);
}

TEST(Split, OnePercentOfHundredLeavesOneLabeled) {
  std::vector<SampleRecord> recs;
  for (std::uint64_t i = 0; i < 100; ++i) recs.push_back({i, 0, {1, static_cast<float>(i)}});
  const auto store = FeatureStore::from_records(recs, 2, 1);
  const auto s = split_initial(store, {0}, 0.01, 0.0, 1);
  EXPECT_EQ(s.labeled.size(), 1u);
  EXPECT_EQ(s.pool.size(), 99u);
  EXPECT_TRUE(s.test.empty());
}

TEST(Split, UnknownSamplesAlwaysInPool) {
  SyntheticSpec spec;
  spec.n_clusters = 5;
  spec.known_clusters = 2;
  spec.per_cluster = 40;
  const auto ds = generate_synthetic_dataset(spec);
  const ClassSet known{0, 1};
  const auto s = split_initial(ds.store, known, 0.5, 0.2, 9);
  check_partition(s, ds.store);
  for (std::size_t r = 0; r < ds.store.size(); ++r) {
    if (!known.contains(ds.store.label(r))) EXPECT_TRUE(s.pool.count(ds.store.id(r)));
  }
  for (SampleId id : s.test) EXPECT_TRUE(known.contains(ds.store.label(*ds.store.row_of(id))));
  for (const auto& [id, label] : s.labeled) EXPECT_TRUE(known.contains(label));
  // 40 per class: 8 test, floor(0.5 * 32) = 16 labeled.
  EXPECT_EQ(s.test.size(), 16u);
  EXPECT_EQ(s.labeled.size(), 32u);
  EXPECT_EQ(s.total(), ds.store.size());
}

TEST(Split, DeterministicAndSeedSensitive) {
  SyntheticSpec spec;
  const auto store = generate_synthetic(spec);
  const auto a = split_initial(store, {0, 1, 2}, 0.1, 0.2, 4);
  const auto b = split_initial(store, {0, 1, 2}, 0.1, 0.2, 4);
  const auto c = split_initial(store, {0, 1, 2}, 0.1, 0.2, 5);
  EXPECT_EQ(a.labeled, b.labeled);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.labeled, c.labeled);
}

TEST(Split, Errors) {
  const auto store = FeatureStore::from_records({{0, 0, {1, 0}}, {1, 2, {0, 1}}}, 2, 3);
  EXPECT_THROW(split_initial(store, {}, 0.1, 0.0, 0), ConfigError);
  EXPECT_THROW(split_initial(store, {0, 1}, 0.1, 0.0, 0), ConfigError);
  EXPECT_THROW(split_initial(store, {0}, 0.0, 0.0, 0), ConfigError);
  EXPECT_THROW(split_initial(store, {0}, 0.1, 1.0, 0), ConfigError);
}

TEST(Split, PartitionCheckCatchesOverlap) {
  SyntheticSpec spec;
  const auto store = generate_synthetic(spec);
  auto s = split_initial(store, {0, 1, 2}, 0.1, 0.2, 4);
  s.pool.insert(s.labeled.begin()->first);
  EXPECT_THROW(check_partition(s, store), StateError);
}
