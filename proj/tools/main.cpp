#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aosa/errors.hpp"
#include "commands.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Active open-set annotation simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed_override;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic feature store from a JSON spec");
  synth->add_option("--config", config, "Synthetic spec (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", out, "Output feature-store path");

  auto* run = app.add_subcommand("run", "Run the query protocol for every seed in a run config");
  run->add_option("--config", config, "Run config (JSON)")->required();
  run->add_option("--out", out, "Output root (overrides output_dir)");
  run->add_option("--seed-override", seed_override, "Run this single seed instead of the config's list");

  auto* bound = app.add_subcommand("bound", "Verify the detection-error bound on a parameter grid");
  bound->add_option("--config", config, "Grid file (JSON)")->required()->check(CLI::ExistingFile);
  bound->add_option("--out", out, "Output CSV path");

  std::string run_dir;
  auto* report = app.add_subcommand("report", "Tabulate final-round metrics per strategy");
  report->add_option("run_dir", run_dir, "Directory holding run outputs")->required();
  report->add_option("--out", out, "Write the table here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const fs::path dest = out.empty() ? aosa::cli::default_output_root() / "synthetic.aosa" : fs::path(out);
      aosa::cli::cmd_synth(config, dest);
      std::cerr << "wrote " << dest << '\n';
    } else if (*run) {
      std::optional<fs::path> root;
      if (!out.empty()) root = fs::path(out);
      const auto outputs = aosa::cli::cmd_run(config, root, seed_override);
      for (const auto& s : outputs.seeds) std::cerr << "seed " << s.seed << ": " << s.rounds_csv << '\n';
      std::cerr << "aggregate: " << outputs.aggregate_csv << '\n';
    } else if (*bound) {
      const fs::path dest = out.empty() ? aosa::cli::default_output_root() / "bound.csv" : fs::path(out);
      const auto rows = aosa::cli::cmd_bound(config, dest);
      std::size_t failed = 0;
      for (const auto& r : rows) failed += !r.pass;
      std::cerr << "wrote " << dest << " (" << rows.size() << " rows, " << failed << " failing)\n";
    } else if (*report) {
      const auto table = aosa::cli::cmd_report(run_dir);
      if (out.empty()) {
        std::cout << table;
      } else {
        std::ofstream(out) << table;
      }
    }
  } catch (const aosa::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
