#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aosa/protocol.hpp"
#include "aosa/theory.hpp"
#include "run_config.hpp"

namespace aosa::cli {

/// Writes the synthetic store described by `spec_path` to `out_path`.
void cmd_synth(const std::filesystem::path& spec_path, const std::filesystem::path& out_path);

struct SeedRun {
  std::uint64_t seed = 0;
  std::filesystem::path rounds_csv;
  std::filesystem::path summary;
  ProtocolResult result;
};

struct RunOutputs {
  std::filesystem::path run_dir;
  std::vector<SeedRun> seeds;
  std::filesystem::path aggregate_csv;
};

/// Runs every seed of the config. Layout:
///   <out>/<label>/seed_<s>/rounds.csv, summary.txt
///   <out>/<label>/aggregate.csv
/// The output root is `out_override`, else the config's output_dir, else
/// $AOSA_OUTPUT_ROOT.
RunOutputs cmd_run(const std::filesystem::path& config_path,
                   const std::optional<std::filesystem::path>& out_override = std::nullopt,
                   std::optional<std::uint64_t> seed_override = std::nullopt);

RunOutputs run_experiment(const RunConfig& cfg, const std::filesystem::path& out_root);

inline constexpr const char* kAggregateCsvHeader =
    "round,n_seeds,precision_mean,precision_std,recall_cum_mean,recall_cum_std,test_accuracy_mean,"
    "test_accuracy_std,known_selected_mean,known_selected_std,labeled_size_mean,labeled_size_std";

/// Mean and sample standard deviation per round across seeds.
std::string aggregate_csv(const std::vector<std::vector<RoundReport>>& per_seed);

std::vector<BoundRow> cmd_bound(const std::filesystem::path& grid_path, const std::filesystem::path& out_path);

struct ReportRow {
  std::string strategy;
  std::size_t seeds = 0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  double precision_mean = 0.0;
  double precision_std = 0.0;
  double recall_mean = 0.0;
  double recall_std = 0.0;
};

/// Final-round metrics per strategy found under `run_dir`, best accuracy first.
std::vector<ReportRow> collect_report(const std::filesystem::path& run_dir);

std::string render_report(const std::vector<ReportRow>& rows);

std::string cmd_report(const std::filesystem::path& run_dir);

/// Output root from $AOSA_OUTPUT_ROOT, or the current directory.
std::filesystem::path default_output_root();

}  // namespace aosa::cli
