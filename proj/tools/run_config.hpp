#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aosa/classes.hpp"
#include "aosa/model.hpp"
#include "aosa/strategies.hpp"
#include "aosa/synthetic.hpp"
#include "aosa/theory.hpp"

namespace aosa::cli {

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "AOSA_OUTPUT_ROOT";

/// One self-contained experiment description. Relative paths are resolved
/// against the directory of the config file.
struct RunConfig {
  std::optional<std::filesystem::path> dataset_path;
  std::optional<SyntheticSpec> dataset_synthetic;
  ClassSet known_classes;
  double init_fraction = 0.01;
  double test_fraction = 0.2;
  std::size_t K = 10;
  std::size_t B = 400;
  std::size_t T = 9;
  StrategyKind strategy = StrategyKind::neat;
  bool prefilter = false;
  bool use_invalid_neighbors = true;
  TrainConfig model;
  std::optional<std::filesystem::path> external_predictions;
  std::vector<std::uint64_t> seeds{0};
  std::optional<std::filesystem::path> output_dir;

  /// Directory name for this run's outputs, e.g. "neat" or "uncertainty+prefilter".
  std::string label() const;
};

/// Parses and validates; unknown keys anywhere are a ConfigError naming them.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

SyntheticSpec parse_synthetic_spec(const std::string& json_text);

struct BoundJob {
  SyntheticSpec spec = default_bound_spec();
  SmoothnessModel smoothness;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  BoundGrid grid;
};

/// A grid file without a "grid" key gets K {1,3,5,7} x e {0,0.05,0.1}.
BoundJob parse_bound_job(const std::string& json_text);

BoundGrid default_bound_grid();

std::string read_text_file(const std::filesystem::path& path);

}  // namespace aosa::cli
