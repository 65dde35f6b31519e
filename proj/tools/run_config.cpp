#include "run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <iterator>
#include <string_view>

#include <json.hpp>

#include "aosa/errors.hpp"

namespace aosa::cli {
namespace {

using nlohmann::json;

json parse_json(const std::string& text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

void require_object(const json& j, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, std::string_view where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

std::size_t read_count(const json& j, const char* key, std::size_t fallback, std::string_view where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw ConfigError(std::string(where) + ": field '" + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

SyntheticSpec synthetic_from_json(const json& j, std::string_view where) {
  require_object(j, where);
  reject_unknown(j,
                 {"n_clusters", "known_clusters", "per_cluster", "dim", "cluster_separation", "noise_sigma",
                  "label_flip_rate", "sigma_K", "seed"},
                 where);
  SyntheticSpec s;
  s.n_clusters = read_count(j, "n_clusters", s.n_clusters, where);
  s.known_clusters = read_count(j, "known_clusters", s.known_clusters, where);
  s.per_cluster = read_count(j, "per_cluster", s.per_cluster, where);
  s.dim = static_cast<std::uint32_t>(read_count(j, "dim", s.dim, where));
  read(j, "cluster_separation", s.cluster_separation, where);
  read(j, "noise_sigma", s.noise_sigma, where);
  read(j, "label_flip_rate", s.label_flip_rate, where);
  read(j, "sigma_K", s.sigma_K, where);
  s.seed = read_count(j, "seed", s.seed, where);
  s.validate();
  return s;
}

TrainConfig train_from_json(const json& j, std::string_view where) {
  require_object(j, where);
  reject_unknown(j, {"epochs", "learning_rate", "lr_decay", "decay_every", "batch_size", "seed"}, where);
  TrainConfig t;
  t.epochs = read_count(j, "epochs", t.epochs, where);
  read(j, "learning_rate", t.learning_rate, where);
  read(j, "lr_decay", t.lr_decay, where);
  t.decay_every = read_count(j, "decay_every", t.decay_every, where);
  t.batch_size = read_count(j, "batch_size", t.batch_size, where);
  t.seed = read_count(j, "seed", t.seed, where);
  t.validate();
  return t;
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

std::string RunConfig::label() const {
  std::string out(strategy_name(strategy));
  if (prefilter) out += "+prefilter";
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SyntheticSpec parse_synthetic_spec(const std::string& json_text) {
  return synthetic_from_json(parse_json(json_text, "synthetic spec"), "synthetic spec");
}

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  const json j = parse_json(json_text, "run config");
  constexpr std::string_view where = "run config";
  require_object(j, where);
  reject_unknown(j,
                 {"dataset", "known_classes", "init_fraction", "test_fraction", "K", "B", "T", "strategy",
                  "prefilter", "use_invalid_neighbors", "model", "external_predictions", "seeds", "output_dir"},
                 where);

  RunConfig cfg;
  if (!j.contains("dataset")) throw ConfigError("run config: missing field 'dataset'");
  const auto& ds = j.at("dataset");
  if (ds.is_string()) {
    cfg.dataset_path = resolve(ds.get<std::string>(), base_dir);
  } else {
    require_object(ds, "run config: dataset");
    reject_unknown(ds, {"path", "synthetic"}, "run config: dataset");
    if (ds.contains("path") == ds.contains("synthetic"))
      throw ConfigError("run config: dataset needs exactly one of 'path' or 'synthetic'");
    if (ds.contains("path")) {
      if (!ds.at("path").is_string()) throw ConfigError("run config: dataset.path must be a string");
      cfg.dataset_path = resolve(ds.at("path").get<std::string>(), base_dir);
    } else {
      cfg.dataset_synthetic = synthetic_from_json(ds.at("synthetic"), "run config: dataset.synthetic");
    }
  }

  if (j.contains("known_classes")) {
    std::vector<ClassLabel> known;
    read(j, "known_classes", known, where);
    cfg.known_classes = ClassSet(std::span<const ClassLabel>(known));
  } else if (cfg.dataset_synthetic) {
    cfg.known_classes = ClassSet::range(static_cast<ClassLabel>(cfg.dataset_synthetic->known_clusters));
  } else {
    throw ConfigError("run config: missing field 'known_classes'");
  }
  if (cfg.known_classes.size() < 2) throw ConfigError("run config: 'known_classes' needs at least 2 classes");

  read(j, "init_fraction", cfg.init_fraction, where);
  read(j, "test_fraction", cfg.test_fraction, where);
  if (!(cfg.init_fraction > 0.0 && cfg.init_fraction < 1.0))
    throw ConfigError("run config: 'init_fraction' must lie in (0, 1)");
  if (!(cfg.test_fraction >= 0.0 && cfg.test_fraction < 1.0))
    throw ConfigError("run config: 'test_fraction' must lie in [0, 1)");

  cfg.K = read_count(j, "K", cfg.K, where);
  cfg.B = read_count(j, "B", cfg.B, where);
  cfg.T = read_count(j, "T", cfg.T, where);
  if (cfg.K < 1) throw ConfigError("run config: 'K' must be >= 1");
  if (cfg.B < 1) throw ConfigError("run config: 'B' must be >= 1");
  if (cfg.T < 1) throw ConfigError("run config: 'T' must be >= 1");

  if (j.contains("strategy")) {
    if (!j.at("strategy").is_string()) throw ConfigError("run config: 'strategy' must be a string");
    cfg.strategy = parse_strategy(j.at("strategy").get<std::string>());
  }
  if (j.contains("prefilter")) {
    const auto& p = j.at("prefilter");
    if (p.is_boolean()) {
      cfg.prefilter = p.get<bool>();
    } else if (p.is_string() && (p == "known_detection" || p == "none")) {
      cfg.prefilter = p == "known_detection";
    } else {
      throw ConfigError("run config: 'prefilter' must be a boolean, \"known_detection\" or \"none\"");
    }
  }
  read(j, "use_invalid_neighbors", cfg.use_invalid_neighbors, where);
  if (j.contains("model")) cfg.model = train_from_json(j.at("model"), "run config: model");
  if (j.contains("external_predictions")) {
    std::string p;
    read(j, "external_predictions", p, where);
    cfg.external_predictions = resolve(p, base_dir);
  }
  if (j.contains("seeds")) {
    const auto& s = j.at("seeds");
    if (!s.is_array() || s.empty()) throw ConfigError("run config: 'seeds' must be a non-empty array");
    cfg.seeds.clear();
    for (const auto& v : s) {
      if (!v.is_number_unsigned()) throw ConfigError("run config: 'seeds' entries must be non-negative integers");
      cfg.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  if (j.contains("output_dir")) {
    std::string p;
    read(j, "output_dir", p, where);
    cfg.output_dir = resolve(p, base_dir);
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text_file(path), path.parent_path());
}

BoundGrid default_bound_grid() {
  BoundGrid g;
  g.K = {1, 3, 5, 7};
  g.e = {0.0, 0.05, 0.1};
  return g;
}

BoundJob parse_bound_job(const std::string& json_text) {
  const json j = parse_json(json_text, "bound grid");
  constexpr std::string_view where = "bound grid";
  require_object(j, where);
  reject_unknown(j, {"spec", "smoothness", "trials", "seed", "threads", "grid"}, where);

  BoundJob job;
  if (j.contains("spec")) job.spec = synthetic_from_json(j.at("spec"), "bound grid: spec");
  if (j.contains("smoothness")) {
    const auto& s = j.at("smoothness");
    require_object(s, "bound grid: smoothness");
    reject_unknown(s, {"C", "alpha"}, "bound grid: smoothness");
    read(s, "C", job.smoothness.C_smooth, "bound grid: smoothness");
    read(s, "alpha", job.smoothness.alpha, "bound grid: smoothness");
  }
  job.trials = read_count(j, "trials", job.trials, where);
  job.seed = read_count(j, "seed", job.seed, where);
  job.threads = static_cast<unsigned>(read_count(j, "threads", job.threads, where));

  if (!j.contains("grid")) {
    job.grid = default_bound_grid();
    return job;
  }
  const auto& g = j.at("grid");
  require_object(g, "bound grid: grid");
  reject_unknown(g, {"K", "e", "C", "alpha", "r_K"}, "bound grid: grid");
  if (g.contains("K")) {
    const auto& ks = g.at("K");
    if (!ks.is_array()) throw ConfigError("bound grid: grid.K must be an array");
    for (const auto& k : ks) {
      if (!k.is_number_integer() || k.get<std::int64_t>() < 1)
        throw ConfigError("bound grid: grid.K entries must be integers >= 1");
      job.grid.K.push_back(k.get<std::size_t>());
    }
  }
  read(g, "e", job.grid.e, "bound grid: grid");
  read(g, "C", job.grid.C_smooth, "bound grid: grid");
  read(g, "alpha", job.grid.alpha, "bound grid: grid");
  read(g, "r_K", job.grid.r_K, "bound grid: grid");
  for (double e : job.grid.e) {
    if (!(e >= 0.0 && e < 0.5)) throw ConfigError("bound grid: grid.e entries must lie in [0, 0.5)");
  }
  return job;
}

}  // namespace aosa::cli
