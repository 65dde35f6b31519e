#include "aosa/theory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "aosa/classes.hpp"
#include "aosa/csv.hpp"
#include "aosa/detection.hpp"
#include "aosa/errors.hpp"
#include "aosa/knn_index.hpp"
#include "aosa/random.hpp"

namespace aosa {
namespace {

struct TrialOutcome {
  bool error = false;
  bool pure = false;
  double r_K = 0.0;
};

ClassLabel other_class(Rng& rng, ClassLabel not_this, ClassLabel n_classes) {
  std::uniform_int_distribution<ClassLabel> pick(0, n_classes - 2);
  ClassLabel c = pick(rng);
  return c >= not_this ? c + 1 : c;
}

std::vector<double> random_unit(Rng& rng, std::size_t dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dim);
  double sq = 0.0;
  while (sq == 0.0) {
    sq = 0.0;
    for (auto& x : v) {
      x = gauss(rng);
      sq += x * x;
    }
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (auto& x : v) x *= inv;
  return v;
}

TrialOutcome run_trial(const SyntheticSpec& spec, const SmoothnessModel& smooth, const ClassSet& known,
                       std::size_t K, std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n_classes = static_cast<ClassLabel>(spec.n_clusters);
  const auto n_known = static_cast<ClassLabel>(spec.known_clusters);
  const std::size_t dim = spec.dim;

  const auto x = random_unit(rng, dim);
  std::uniform_int_distribution<ClassLabel> unknown_class(n_known, n_classes - 1);
  const ClassLabel query_class = unknown_class(rng);

  KnnIndex index(spec.dim);
  std::vector<ClassLabel> true_label(spec.per_cluster);
  std::vector<float> point(dim);
  for (std::size_t i = 0; i < spec.per_cluster; ++i) {
    // Direction orthogonal to x via one Gram-Schmidt step.
    auto u = random_unit(rng, dim);
    double proj = 0.0;
    for (std::size_t d = 0; d < dim; ++d) proj += u[d] * x[d];
    double sq = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      u[d] -= proj * x[d];
      sq += u[d] * u[d];
    }
    const double inv = sq > 0.0 ? 1.0 / std::sqrt(sq) : 0.0;
    const double theta = spec.noise_sigma * std::abs(gauss(rng));
    const double rho = 1.0 - std::cos(theta);
    for (std::size_t d = 0; d < dim; ++d)
      point[d] = static_cast<float>(std::cos(theta) * x[d] + std::sin(theta) * u[d] * inv);

    const double p_differ = std::min(1.0, smooth.C_smooth * std::pow(rho, smooth.alpha));
    true_label[i] = unit(rng) < p_differ ? other_class(rng, query_class, n_classes) : query_class;
    ClassLabel observed = true_label[i];
    if (unit(rng) < spec.label_flip_rate) observed = other_class(rng, observed, n_classes);
    index.add(i, observed, point);
  }

  std::vector<float> query(x.begin(), x.end());
  const auto nn = index.query(query, K);
  TrialOutcome out;
  out.error = all_neighbors_known(nn, known);
  out.r_K = nn.neighbors.back().distance;
  out.pure = std::all_of(nn.neighbors.begin(), nn.neighbors.end(),
                         [&](const Neighbor& n) { return true_label[n.id] == query_class; });
  return out;
}

void validate_sim_spec(const SyntheticSpec& spec, const SmoothnessModel& smooth, std::size_t K, std::size_t trials) {
  spec.validate();
  if (trials < kMinTrials)
    throw ConfigError("simulate_detection_error: trials must be >= " + std::to_string(kMinTrials));
  if (K < 1) throw ConfigError("simulate_detection_error: K must be >= 1");
  if (spec.known_clusters < 1 || spec.known_clusters >= spec.n_clusters)
    throw ConfigError("simulate_detection_error: need at least one known and one unknown class");
  if (spec.dim < 2) throw ConfigError("simulate_detection_error: dim must be >= 2");
  if (spec.per_cluster < K) throw ConfigError("simulate_detection_error: per_cluster must be >= K");
  if (!(smooth.C_smooth > 0.0)) throw ConfigError("simulate_detection_error: C_smooth must be > 0");
  if (!(smooth.alpha > 0.0 && smooth.alpha < 1.0))
    throw ConfigError("simulate_detection_error: alpha must lie in (0, 1)");
}

}  // namespace

void BoundParams::validate() const {
  if (K < 1) throw ConfigError("bound: K must be >= 1");
  if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("bound: e must lie in [0, 1]");
  if (!(C_smooth > 0.0) || !std::isfinite(C_smooth)) throw ConfigError("bound: C must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("bound: alpha must lie in (0, 1)");
  if (!(r_K >= 0.0) || !std::isfinite(r_K)) throw ConfigError("bound: r_K must be >= 0");
}

SumRange mislabeled_majority_range(std::size_t K) {
  const long k = static_cast<long>(K);
  // ceil((K-1)/2) for K >= 1 is K/2 in integer arithmetic.
  return {k / 2 + 1, k};
}

SumRange labeled_majority_range(std::size_t K) {
  const long k = static_cast<long>(K);
  return {0, (k + 1) / 2 - 1};
}

long double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0L;
  k = std::min(k, n - k);
  // Multiplicative form; each partial product is itself a binomial
  // coefficient, so the division is exact while values fit the mantissa.
  long double c = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
  return std::round(c);
}

double detection_error_bound(const BoundParams& p) {
  p.validate();
  const long double q = static_cast<long double>(p.C_smooth) * std::pow(static_cast<long double>(p.r_K), p.alpha);
  const long double e = p.e;
  auto weight = [&](long k) {
    return binomial(p.K, static_cast<std::size_t>(k)) * std::pow(e, k) * std::pow(1.0L - e, static_cast<long>(p.K) - k);
  };
  long double total = 0.0L;
  const auto first = mislabeled_majority_range(p.K);
  for (long k = first.first; k <= first.last; ++k) total += weight(k) * std::pow(q, k);
  const auto second = labeled_majority_range(p.K);
  for (long k = second.first; k <= second.last; ++k) total += weight(k) * std::pow(q, static_cast<long>(p.K) - k);
  return static_cast<double>(std::max(total, 0.0L));
}

DetectionSimResult simulate_detection_error(const SyntheticSpec& spec, const SmoothnessModel& smooth, std::size_t K,
                                            std::size_t trials, std::uint64_t seed, unsigned threads) {
  validate_sim_spec(spec, smooth, K, trials);
  const ClassSet known = ClassSet::range(static_cast<ClassLabel>(spec.known_clusters));

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));
  std::vector<TrialOutcome> outcomes(trials);
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t t = w; t < trials; t += threads)
          outcomes[t] = run_trial(spec, smooth, known, K, derive_seed(seed, t));
      });
    }
  }

  DetectionSimResult r;
  r.trials = trials;
  for (const auto& o : outcomes) {
    r.errors += o.error;
    r.r_K_max = std::max(r.r_K_max, o.r_K);
    if (o.pure) {
      ++r.pure_trials;
      r.pure_errors += o.error;
    }
  }
  const double n = static_cast<double>(trials);
  r.empirical_error = static_cast<double>(r.errors) / n;
  r.standard_error = std::sqrt(r.empirical_error * (1.0 - r.empirical_error) / n);
  return r;
}

SyntheticSpec default_bound_spec() {
  SyntheticSpec spec;
  spec.n_clusters = 10;
  spec.known_clusters = 2;
  spec.per_cluster = 50;
  spec.dim = 16;
  spec.cluster_separation = 1.0;
  spec.noise_sigma = 0.3;
  spec.label_flip_rate = 0.0;
  spec.sigma_K = 0.0;
  spec.seed = 0;
  return spec;
}

std::vector<BoundRow> verify_bound_grid(const BoundGrid& grid, const SyntheticSpec& spec,
                                        const SmoothnessModel& smooth, std::size_t trials, std::uint64_t seed,
                                        unsigned threads) {
  for (std::size_t K : grid.K) {
    if (K < 1) throw ConfigError("bound grid: K must be >= 1");
  }
  const std::vector<double> Cs = grid.C_smooth.empty() ? std::vector<double>{smooth.C_smooth} : grid.C_smooth;
  const std::vector<double> alphas = grid.alpha.empty() ? std::vector<double>{smooth.alpha} : grid.alpha;
  const std::vector<std::optional<double>> radii = [&] {
    std::vector<std::optional<double>> out;
    if (grid.r_K.empty()) out.push_back(std::nullopt);
    for (double r : grid.r_K) out.emplace_back(r);
    return out;
  }();

  std::vector<BoundRow> rows;
  std::map<std::tuple<std::size_t, double, double, double>, DetectionSimResult> cache;
  for (std::size_t K : grid.K) {
    for (double e : grid.e) {
      for (double C : Cs) {
        for (double alpha : alphas) {
          auto key = std::make_tuple(K, e, C, alpha);
          auto it = cache.find(key);
          if (it == cache.end()) {
            SyntheticSpec cell = spec;
            cell.label_flip_rate = e;
            const std::uint64_t cell_seed = derive_seed(seed, cache.size());
            it = cache.emplace(key, simulate_detection_error(cell, {C, alpha}, K, trials, cell_seed, threads)).first;
          }
          const auto& sim = it->second;
          for (const auto& r : radii) {
            BoundRow row;
            row.params = {K, e, C, alpha, r.value_or(sim.r_K_max)};
            row.bound = detection_error_bound(row.params);
            row.empirical = sim.empirical_error;
            row.standard_error = sim.standard_error;
            row.pass = row.empirical <= row.bound + 3.0 * row.standard_error;
            row.vacuous = row.bound > 1.0;
            row.pure_trials = sim.pure_trials;
            row.pure_errors = sim.pure_errors;
            rows.push_back(row);
          }
        }
      }
    }
  }
  return rows;
}

std::string bound_table_csv(std::span<const BoundRow> rows) {
  std::ostringstream out;
  out << kBoundCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.params.K << ',' << csv::format(r.params.e) << ',' << csv::format(r.params.C_smooth) << ','
        << csv::format(r.params.alpha) << ',' << csv::format(r.params.r_K) << ',' << csv::format(r.bound) << ','
        << csv::format(r.empirical) << ',' << csv::format(r.standard_error) << ',' << (r.pass ? "true" : "false")
        << ',' << (r.vacuous ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace aosa
