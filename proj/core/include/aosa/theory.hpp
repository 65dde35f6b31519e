#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aosa/synthetic.hpp"

namespace aosa {

/// Inputs to the detection-error bound.
///
/// `e` caps the labeling-error rate; `C_smooth` and `alpha` bound the
/// chance two samples at distance rho disagree on their true label by
/// C_smooth * rho^alpha; `r_K` is the radius enclosing the K nearest
/// neighbors.
struct BoundParams {
  std::size_t K = 1;
  double e = 0.0;
  double C_smooth = 1.0;
  double alpha = 0.5;
  double r_K = 0.0;

  /// ConfigError on K < 1, e outside [0,1], C_smooth <= 0, alpha outside (0,1), r_K < 0.
  void validate() const;
};

/// Inclusive k-range of one sum; empty when first > last.
struct SumRange {
  long first = 0;
  long last = -1;

  bool empty() const noexcept { return first > last; }
  friend bool operator==(const SumRange&, const SumRange&) = default;
};

/// Index sets of the two sums:
///   mislabeled majority: k = ceil((K-1)/2)+1 .. K
///   labeled majority:    k = 0 .. floor((K+1)/2)-1
SumRange mislabeled_majority_range(std::size_t K);
SumRange labeled_majority_range(std::size_t K);

/// Exact binomial coefficient (long double; exact while it fits 64 bits).
long double binomial(std::size_t n, std::size_t k);

/// With q = C_smooth * r_K^alpha and b(k) = C(K,k) e^k (1-e)^(K-k):
///   sum_{k in mislabeled majority} b(k) q^k + sum_{k in labeled majority} b(k) q^(K-k)
/// Returned unclamped above; values over 1 are valid but vacuous.
double detection_error_bound(const BoundParams& params);

/// Label-smoothness constants the simulator builds into its data.
struct SmoothnessModel {
  double C_smooth = 2.0;
  double alpha = 0.5;
};

/// Monte-Carlo outcome. Only false-known decisions count as errors: every
/// query comes from an unknown class and the detector errs when it admits
/// the query as known.
struct DetectionSimResult {
  double empirical_error = 0.0;
  double standard_error = 0.0;
  /// Largest K-th neighbor distance seen over all trials.
  double r_K_max = 0.0;
  std::size_t trials = 0;
  std::size_t errors = 0;
  /// Trials whose K neighbors all shared the query's true label.
  std::size_t pure_trials = 0;
  std::size_t pure_errors = 0;
};

inline constexpr std::size_t kMinTrials = 100;

/// One trial, with `spec` read as:
///   n_clusters classes, the first known_clusters of them known;
///   per_cluster labeled points around the query; noise_sigma the angular
///   spread; label_flip_rate the labeling error e.
///
///  1. Draw a query direction x uniformly on the sphere and a true class
///     uniformly among the unknown classes.
///  2. Place each labeled point at angle theta = noise_sigma * |z|,
///     z ~ N(0,1), in a random direction orthogonal to x, so its cosine
///     distance to x is rho = 1 - cos(theta).
///  3. Its true label differs from the query's with probability
///     min(1, C_smooth * rho^alpha), drawn uniformly among the other classes.
///  4. Its observed label flips to a uniformly random other class with
///     probability e.
///  5. Index the labeled points by observed label, take the query's K
///     nearest, and apply the all-K-known rule.
///
/// Trials use seeds derived from (seed, trial index), so results do not
/// depend on `threads`. trials < 100 is a ConfigError.
DetectionSimResult simulate_detection_error(const SyntheticSpec& spec, const SmoothnessModel& smooth, std::size_t K,
                                            std::size_t trials, std::uint64_t seed, unsigned threads = 0);

/// The regime the bound verification runs on by default.
SyntheticSpec default_bound_spec();

/// Axes of the verification grid. K and e must be non-empty for any row
/// to exist; empty C/alpha/r_K axes mean "use the smoothness model" and
/// "use the measured radius".
struct BoundGrid {
  std::vector<std::size_t> K;
  std::vector<double> e;
  std::vector<double> C_smooth;
  std::vector<double> alpha;
  std::vector<double> r_K;
};

struct BoundRow {
  BoundParams params;
  double bound = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
  bool pass = false;
  bool vacuous = false;
  std::size_t pure_trials = 0;
  std::size_t pure_errors = 0;
};

/// Cartesian product over the grid. A row passes iff
/// empirical <= bound + 3 * standard_error.
std::vector<BoundRow> verify_bound_grid(const BoundGrid& grid, const SyntheticSpec& spec,
                                        const SmoothnessModel& smooth, std::size_t trials, std::uint64_t seed,
                                        unsigned threads = 0);

inline constexpr const char* kBoundCsvHeader = "K,e,C,alpha,r_K,bound,empirical,stderr,pass,vacuous";

std::string bound_table_csv(std::span<const BoundRow> rows);

}  // namespace aosa
