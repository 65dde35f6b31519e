#include "aosa/synthetic.hpp"

#include <cmath>
#include <string>

#include "aosa/errors.hpp"
#include "aosa/random.hpp"

namespace aosa {

void SyntheticSpec::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("synthetic spec field '" + field + "': " + why);
  };
  if (n_clusters < 1) fail("n_clusters", "must be >= 1");
  if (known_clusters > n_clusters) fail("known_clusters", "must not exceed n_clusters");
  if (per_cluster < 1) fail("per_cluster", "must be >= 1");
  if (dim < 1) fail("dim", "must be >= 1");
  if (!(cluster_separation > 0.0) || !std::isfinite(cluster_separation))
    fail("cluster_separation", "must be > 0");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) fail("noise_sigma", "must be >= 0");
  if (!(label_flip_rate >= 0.0 && label_flip_rate < 0.5))
    fail("label_flip_rate", "must lie in [0, 0.5)");
  if (!(sigma_K >= 0.0 && sigma_K <= 1.0)) fail("sigma_K", "must lie in [0, 1]");
}

SyntheticDataset generate_synthetic_dataset(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::vector<double>> centers(spec.n_clusters, std::vector<double>(spec.dim));
  for (auto& center : centers) {
    double sq = 0.0;
    do {
      sq = 0.0;
      for (auto& v : center) {
        v = gauss(rng);
        sq += v * v;
      }
    } while (sq == 0.0);
    const double scale = spec.cluster_separation / std::sqrt(sq);
    for (auto& v : center) v *= scale;
  }

  const auto n_classes = static_cast<ClassLabel>(spec.n_clusters);
  std::uniform_int_distribution<ClassLabel> other(0, std::max<ClassLabel>(n_classes - 2, 0));

  SyntheticDataset out;
  std::vector<SampleRecord> records;
  records.reserve(spec.n_clusters * spec.per_cluster);
  SampleId next_id = 0;
  for (std::size_t c = 0; c < spec.n_clusters; ++c) {
    for (std::size_t i = 0; i < spec.per_cluster; ++i) {
      SampleRecord rec;
      rec.id = next_id++;
      rec.feature.resize(spec.dim);
      double sq = 0.0;
      do {
        sq = 0.0;
        for (std::uint32_t d = 0; d < spec.dim; ++d) {
          const double v = centers[c][d] + spec.noise_sigma * gauss(rng);
          rec.feature[d] = static_cast<float>(v);
          sq += v * v;
        }
      } while (sq == 0.0);

      const auto cluster = static_cast<ClassLabel>(c);
      rec.label = cluster;
      if (n_classes > 1 && unit(rng) < spec.label_flip_rate) {
        ClassLabel flipped = other(rng);
        if (flipped >= cluster) ++flipped;
        rec.label = flipped;
        ++out.flipped;
      }
      out.true_cluster.push_back(cluster);
      records.push_back(std::move(rec));
    }
  }
  out.store = FeatureStore::from_records(std::move(records), spec.dim,
                                         static_cast<std::uint32_t>(spec.n_clusters));
  return out;
}

FeatureStore generate_synthetic(const SyntheticSpec& spec) {
  return generate_synthetic_dataset(spec).store;
}

}  // namespace aosa
