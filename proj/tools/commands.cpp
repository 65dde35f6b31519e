#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "aosa/csv.hpp"
#include "aosa/errors.hpp"
#include "aosa/feature_store.hpp"
#include "aosa/model.hpp"
#include "aosa/synthetic.hpp"

namespace aosa::cli {
namespace {

namespace fs = std::filesystem;

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return {std::nan(""), std::nan("")};
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

std::string join_classes(const ClassSet& classes) {
  std::string out;
  for (ClassLabel c : classes) {
    if (!out.empty()) out += ' ';
    out += std::to_string(c);
  }
  return out;
}

std::string summary_text(const RunConfig& cfg, std::uint64_t seed, const ProtocolResult& result,
                         double wall_seconds) {
  std::ostringstream s;
  auto kv = [&](std::string_view key, const auto& value) { s << key << " = " << value << '\n'; };
  kv("strategy", strategy_name(cfg.strategy));
  kv("label", cfg.label());
  kv("prefilter", cfg.prefilter ? "known_detection" : "none");
  kv("seed", seed);
  kv("dataset", cfg.dataset_path ? cfg.dataset_path->string() : std::string("synthetic"));
  if (cfg.dataset_synthetic) kv("synthetic_seed", cfg.dataset_synthetic->seed);
  kv("known_classes", join_classes(cfg.known_classes));
  kv("init_fraction", csv::format(cfg.init_fraction));
  kv("test_fraction", csv::format(cfg.test_fraction));
  kv("K", cfg.K);
  kv("B", cfg.B);
  kv("T", cfg.T);
  kv("use_invalid_neighbors", cfg.use_invalid_neighbors ? "true" : "false");
  kv("model_epochs", cfg.model.epochs);
  kv("model_learning_rate", csv::format(cfg.model.learning_rate));
  kv("model_lr_decay", csv::format(cfg.model.lr_decay));
  kv("model_decay_every", cfg.model.decay_every);
  kv("model_batch_size", cfg.model.batch_size);
  if (cfg.external_predictions) {
    kv("classifier", "external predictions (" + cfg.external_predictions->string() + ")");
    kv("model_substitution", "false");
  } else {
    kv("classifier", "softmax regression on stored features");
    kv("model_substitution", "true (feature-space linear classifier stands in for an image network)");
  }
  kv("n_samples", result.n_samples);
  kv("n_total_known", result.n_total_known);
  kv("rounds_completed", result.rounds.size());
  kv("truncated", result.truncated ? "true (pool exhausted)" : "false");
  if (!result.rounds.empty()) {
    const auto& last = result.rounds.back();
    kv("final_test_accuracy", csv::format(last.test_accuracy));
    kv("final_precision", csv::format(last.precision));
    kv("final_recall_cum", csv::format(last.recall_cumulative));
  }
  kv("wall_time_seconds", csv::format(wall_seconds));
  return s.str();
}

std::map<std::string, std::string> parse_summary(const fs::path& path) {
  std::map<std::string, std::string> kv;
  std::istringstream in(read_text_file(path));
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos)
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

}  // namespace

fs::path default_output_root() {
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
  return fs::current_path();
}

void cmd_synth(const fs::path& spec_path, const fs::path& out_path) {
  const auto spec = parse_synthetic_spec(read_text_file(spec_path));
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  save_feature_store(generate_synthetic(spec), out_path);
}

std::string aggregate_csv(const std::vector<std::vector<RoundReport>>& per_seed) {
  std::ostringstream out;
  out << kAggregateCsvHeader << '\n';
  std::size_t max_rounds = 0;
  for (const auto& r : per_seed) max_rounds = std::max(max_rounds, r.size());
  for (std::size_t t = 0; t < max_rounds; ++t) {
    std::vector<double> precision, recall, accuracy, known, labeled;
    for (const auto& r : per_seed) {
      if (t >= r.size()) continue;
      precision.push_back(r[t].precision);
      recall.push_back(r[t].recall_cumulative);
      accuracy.push_back(r[t].test_accuracy);
      known.push_back(static_cast<double>(r[t].known_selected));
      labeled.push_back(static_cast<double>(r[t].labeled_size));
    }
    out << (t + 1) << ',' << precision.size();
    for (const auto* xs : {&precision, &recall, &accuracy, &known, &labeled}) {
      const auto ms = mean_std(*xs);
      out << ',' << csv::format(ms.mean) << ',' << csv::format(ms.std);
    }
    out << '\n';
  }
  return out.str();
}

RunOutputs run_experiment(const RunConfig& cfg, const fs::path& out_root) {
  FeatureStore store = cfg.dataset_path ? load_feature_store(*cfg.dataset_path) : generate_synthetic(*cfg.dataset_synthetic);

  std::optional<ExternalPredictions> external;
  if (cfg.external_predictions) external = load_external_predictions(*cfg.external_predictions, cfg.known_classes, &store);

  RunOutputs outputs;
  outputs.run_dir = out_root / cfg.label();
  fs::create_directories(outputs.run_dir);

  std::vector<std::vector<RoundReport>> per_seed;
  for (std::uint64_t seed : cfg.seeds) {
    ProtocolConfig pc;
    pc.rounds = cfg.T;
    pc.budget = cfg.B;
    pc.K = cfg.K;
    pc.strategy = cfg.strategy;
    pc.prefilter = cfg.prefilter;
    pc.use_invalid_neighbors = cfg.use_invalid_neighbors;
    pc.known = cfg.known_classes;
    pc.init_fraction = cfg.init_fraction;
    pc.test_fraction = cfg.test_fraction;
    pc.seed = seed;
    pc.train = cfg.model;

    const auto started = std::chrono::steady_clock::now();
    SeedRun run;
    run.seed = seed;
    run.result = run_protocol(pc, store, external ? &*external : nullptr);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    const fs::path seed_dir = outputs.run_dir / ("seed_" + std::to_string(seed));
    fs::create_directories(seed_dir);
    run.rounds_csv = seed_dir / "rounds.csv";
    run.summary = seed_dir / "summary.txt";
    csv::write_file_atomic(run.rounds_csv.string(), rounds_csv(run.result.rounds));
    csv::write_file_atomic(run.summary.string(), summary_text(cfg, seed, run.result, wall));
    per_seed.push_back(run.result.rounds);
    outputs.seeds.push_back(std::move(run));
  }
  outputs.aggregate_csv = outputs.run_dir / "aggregate.csv";
  csv::write_file_atomic(outputs.aggregate_csv.string(), aggregate_csv(per_seed));
  return outputs;
}

RunOutputs cmd_run(const fs::path& config_path, const std::optional<fs::path>& out_override,
                   std::optional<std::uint64_t> seed_override) {
  RunConfig cfg = load_run_config(config_path);
  if (seed_override) cfg.seeds = {*seed_override};
  if (cfg.dataset_path && !fs::exists(*cfg.dataset_path))
    throw ConfigError("dataset not found: " + cfg.dataset_path->string());
  const fs::path root = out_override ? *out_override : cfg.output_dir ? *cfg.output_dir : default_output_root();
  return run_experiment(cfg, root);
}

std::vector<BoundRow> cmd_bound(const fs::path& grid_path, const fs::path& out_path) {
  const auto job = parse_bound_job(read_text_file(grid_path));
  auto rows = verify_bound_grid(job.grid, job.spec, job.smoothness, job.trials, job.seed, job.threads);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  csv::write_file_atomic(out_path.string(), bound_table_csv(rows));
  return rows;
}

std::vector<ReportRow> collect_report(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) throw ConfigError("report: not a directory: " + run_dir.string());

  std::vector<fs::path> summaries;
  for (const auto& entry : fs::recursive_directory_iterator(run_dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "summary.txt") summaries.push_back(entry.path());
  }
  std::sort(summaries.begin(), summaries.end());
  if (summaries.empty()) throw ConfigError("report: no runs found under " + run_dir.string());

  struct Finals {
    std::vector<double> accuracy, precision, recall;
  };
  std::map<std::string, Finals> by_label;
  for (const auto& summary_path : summaries) {
    const auto kv = parse_summary(summary_path);
    auto it = kv.find("label");
    if (it == kv.end()) throw DataError(summary_path.string() + ": missing 'label'");
    const fs::path csv_path = summary_path.parent_path() / "rounds.csv";
    const auto rounds = parse_rounds_csv(read_text_file(csv_path), csv_path.string());
    if (rounds.empty()) throw DataError(csv_path.string() + ": no rounds");
    auto& f = by_label[it->second];
    f.accuracy.push_back(rounds.back().test_accuracy);
    f.precision.push_back(rounds.back().precision);
    f.recall.push_back(rounds.back().recall_cumulative);
  }

  std::vector<ReportRow> rows;
  for (const auto& [label, f] : by_label) {
    ReportRow r;
    r.strategy = label;
    r.seeds = f.accuracy.size();
    const auto a = mean_std(f.accuracy), p = mean_std(f.precision), rc = mean_std(f.recall);
    r.accuracy_mean = a.mean;
    r.accuracy_std = a.std;
    r.precision_mean = p.mean;
    r.precision_std = p.std;
    r.recall_mean = rc.mean;
    r.recall_std = rc.std;
    rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ReportRow& a, const ReportRow& b) { return a.accuracy_mean > b.accuracy_mean; });
  return rows;
}

std::string render_report(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(24) << "strategy" << std::setw(7) << "seeds" << std::setw(20) << "accuracy"
      << std::setw(20) << "precision" << "recall\n";
  auto cell = [](double m, double s) {
    std::ostringstream c;
    c << std::fixed << std::setprecision(4) << m << " +- " << s;
    return c.str();
  };
  for (const auto& r : rows) {
    out << std::left << std::setw(24) << r.strategy << std::setw(7) << r.seeds << std::setw(20)
        << cell(r.accuracy_mean, r.accuracy_std) << std::setw(20) << cell(r.precision_mean, r.precision_std)
        << cell(r.recall_mean, r.recall_std) << '\n';
  }
  return out.str();
}

std::string cmd_report(const fs::path& run_dir) { return render_report(collect_report(run_dir)); }

}  // namespace aosa::cli
