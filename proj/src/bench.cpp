#include "geofuse/bench.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "geofuse/random.hpp"

namespace geofuse {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

GeneratorSpec generator_from_json(const nlohmann::json& j, const std::string& where) {
  reject_unknown(j, {"kind", "n", "noise", "seed", "imbalance", "classes"}, where);
  GeneratorSpec g;
  try {
    g.kind = parse_synthetic_kind(j.at("kind").get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  g.n = get_or<std::size_t>(j, "n", g.n);
  g.noise = get_or<double>(j, "noise", g.noise);
  if (j.contains("seed")) g.seed = get_or<std::uint64_t>(j, "seed", 0);
  g.options.imbalance = get_or<double>(j, "imbalance", g.options.imbalance);
  g.options.classes = get_or<std::size_t>(j, "classes", g.options.classes);
  return g;
}

nlohmann::json generator_json(const GeneratorSpec& g) {
  nlohmann::json j = {{"kind", to_string(g.kind)},
                      {"n", g.n},
                      {"noise", g.noise},
                      {"imbalance", g.options.imbalance},
                      {"classes", g.options.classes}};
  if (g.seed) j["seed"] = *g.seed;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  if (datasets.empty()) throw ConfigError("configuration lists no datasets");
  if (combiners.empty()) throw ConfigError("configuration lists no combiners");
  if (base_kinds.empty()) throw ConfigError("configuration lists no base classifiers");
  if (folds < 2) throw ConfigError("folds must be at least 2");
  if (inner_folds < 2) throw ConfigError("inner_folds must be at least 2");
  if (gamma_grid.empty()) throw ConfigError("gamma grid is empty");
  for (double g : gamma_grid)
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("gamma grid values must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!(pipeline.variance_target > 0.0 && pipeline.variance_target <= 1.0))
    throw ConfigError("variance_target must lie in (0, 1]");
  for (auto c : combiners)
    if (base_kinds.size() < min_members(c))
      throw ConfigError(to_string(c) + " needs at least " + std::to_string(min_members(c)) +
                        " base classifiers");
  std::set<std::string> names;
  for (const auto& d : datasets) {
    if (d.name.empty()) throw ConfigError("dataset entry without a name");
    if (!names.insert(d.name).second) throw ConfigError("duplicate dataset name '" + d.name + "'");
    if (d.path.has_value() == d.generator.has_value())
      throw ConfigError("dataset '" + d.name + "' needs exactly one of 'path' or 'generator'");
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(j,
                 {"datasets", "combiners", "base_kinds", "folds", "gamma_grid", "alpha", "seed",
                  "output_dir", "inner_folds", "preprocessing", "trainers"},
                 "configuration");
  ExperimentConfig cfg;
  if (!j.contains("datasets") || !j["datasets"].is_array())
    throw ConfigError("configuration needs a 'datasets' array");
  for (const auto& d : j["datasets"]) {
    if (!d.is_object()) throw ConfigError("dataset entries must be objects");
    reject_unknown(d, {"name", "path", "generator"}, "dataset entry");
    DatasetEntry e;
    e.name = get_or<std::string>(d, "name", "");
    if (d.contains("path")) {
      std::filesystem::path p = get_or<std::string>(d, "path", "");
      e.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (d.contains("generator")) e.generator = generator_from_json(d["generator"], "dataset '" + e.name + "'");
    cfg.datasets.push_back(std::move(e));
  }
  try {
    if (j.contains("combiners")) {
      cfg.combiners.clear();
      for (const auto& c : j["combiners"]) cfg.combiners.push_back(parse_combiner(c.get<std::string>()));
    }
    if (j.contains("base_kinds")) {
      cfg.base_kinds.clear();
      for (const auto& k : j["base_kinds"]) cfg.base_kinds.push_back(parse_base_kind(k.get<std::string>()));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  cfg.folds = get_or<std::size_t>(j, "folds", cfg.folds);
  cfg.gamma_grid = get_or<std::vector<double>>(j, "gamma_grid", cfg.gamma_grid);
  cfg.alpha = get_or<double>(j, "alpha", cfg.alpha);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir.string());
  if (cfg.output_dir.is_relative() && !base_dir.empty() && j.contains("output_dir"))
    cfg.output_dir = base_dir / cfg.output_dir;
  cfg.inner_folds = get_or<std::size_t>(j, "inner_folds", cfg.inner_folds);
  if (j.contains("preprocessing")) {
    const auto& p = j["preprocessing"];
    reject_unknown(p, {"enabled", "variance_target"}, "preprocessing");
    cfg.pipeline.enabled = get_or<bool>(p, "enabled", cfg.pipeline.enabled);
    cfg.pipeline.variance_target = get_or<double>(p, "variance_target", cfg.pipeline.variance_target);
  }
  if (j.contains("trainers")) {
    try {
      cfg.trainers = trainer_config_from_json(j["trainers"]);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("trainers: ") + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("configuration is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j, path.parent_path());
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json datasets = nlohmann::json::array();
  for (const auto& d : cfg.datasets) {
    nlohmann::json e = {{"name", d.name}};
    if (d.path) e["path"] = d.path->string();
    if (d.generator) e["generator"] = generator_json(*d.generator);
    datasets.push_back(e);
  }
  std::vector<std::string> combiners, kinds;
  for (auto c : cfg.combiners) combiners.push_back(to_string(c));
  for (auto k : cfg.base_kinds) kinds.push_back(to_string(k));
  return {
      {"datasets", datasets},
      {"combiners", combiners},
      {"base_kinds", kinds},
      {"folds", cfg.folds},
      {"gamma_grid", cfg.gamma_grid},
      {"alpha", cfg.alpha},
      {"seed", cfg.seed},
      {"output_dir", cfg.output_dir.string()},
      {"inner_folds", cfg.inner_folds},
      {"preprocessing",
       {{"enabled", cfg.pipeline.enabled}, {"variance_target", cfg.pipeline.variance_target}}},
      {"trainers", to_json(cfg.trainers)},
  };
}

std::string config_digest(const ExperimentConfig& cfg) {
  auto j = to_json(cfg);
  j.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

// ---------------------------------------------------------------------------
// Running

RunStatus RunManifest::status() const {
  std::size_t failed = 0;
  for (const auto& d : datasets)
    if (d.error) ++failed;
  if (failed == 0) return RunStatus::Complete;
  return failed == datasets.size() ? RunStatus::Failed : RunStatus::Partial;
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Complete: return "complete";
    case RunStatus::Partial: return "partial";
    case RunStatus::Failed: return "failed";
  }
  return "?";
}

namespace {

DatasetRun run_dataset(const DatasetEntry& entry, const ExperimentConfig& cfg) {
  DatasetRun run;
  run.name = entry.name;
  if (entry.path) {
    run.source = entry.path->string();
  } else {
    run.source = "generator:" + to_string(entry.generator->kind);
  }
  try {
    Dataset ds = entry.path
                     ? load_dataset(*entry.path)
                     : generate_synthetic(entry.generator->kind, entry.generator->n,
                                          entry.generator->noise,
                                          entry.generator->seed.value_or(cfg.seed),
                                          entry.generator->options);
    run.meta = compute_meta(ds);
    const auto plan = stratified_kfold(ds, cfg.folds, derive_seed(cfg.seed, entry.name));
    ModelSpec model;
    model.kinds = cfg.base_kinds;
    model.rules = cfg.combiners;
    model.gamma_grid = cfg.gamma_grid;
    model.inner_folds = cfg.inner_folds;
    model.trainers = cfg.trainers;
    const auto cv = cross_validate(ds, plan, cfg.pipeline, model);
    for (const auto& o : cv.rules)
      run.results.push_back({o.rule, o.fold_gamma, o.pooled, o.fold_reports});
    run.member_digests = cv.fold_member_digests;
    run.fold_dims = cv.fold_output_dims;
  } catch (const std::exception& e) {
    run.error = e.what();
    run.results.clear();
  }
  return run;
}

}  // namespace

RunManifest run_benchmark(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  RunManifest m;
  m.config = to_json(cfg);
  m.config.erase("output_dir");
  m.config_digest = config_digest(cfg);
  m.started_at = utc_now();
  for (const auto& entry : cfg.datasets) {
    const auto t0 = std::chrono::steady_clock::now();
    m.datasets.push_back(run_dataset(entry, cfg));
    if (log) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const auto& d = m.datasets.back();
      *log << "[" << d.name << "] " << (d.error ? "error: " + *d.error : std::string("ok"))
           << " (" << std::fixed << std::setprecision(1) << secs << " s)\n";
      log->unsetf(std::ios::fixed);
    }
  }
  m.finished_at = utc_now();
  return m;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json datasets = nlohmann::json::array();
  for (const auto& d : m.datasets) {
    nlohmann::json dj = {{"name", d.name}, {"source", d.source}};
    dj["status"] = d.error ? "error" : "ok";
    dj["error"] = d.error ? nlohmann::json(*d.error) : nlohmann::json(nullptr);
    if (d.meta) {
      dj["meta"] = {{"n_instances", d.meta->n_instances},
                    {"n_features", d.meta->n_features},
                    {"n_classes", d.meta->n_classes},
                    {"imbalance_ratio", d.meta->imbalance_ratio}};
    } else {
      dj["meta"] = nullptr;
    }
    nlohmann::json results = nlohmann::json::array();
    for (const auto& r : d.results) {
      nlohmann::json rj = {{"combiner", to_string(r.combiner)}, {"pooled", to_json(r.pooled)}};
      if (uses_potential(r.combiner)) {
        nlohmann::json g = nlohmann::json::array();
        for (const auto& v : r.gamma_per_fold) g.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
        rj["gamma"] = g;
      } else {
        rj["gamma"] = nullptr;
      }
      nlohmann::json folds = nlohmann::json::array();
      for (const auto& f : r.folds) folds.push_back(to_json(f));
      rj["folds"] = folds;
      results.push_back(rj);
    }
    dj["results"] = results;
    dj["member_digests"] = d.member_digests;
    dj["fold_dims"] = d.fold_dims;
    datasets.push_back(dj);
  }
  return {
      {"format", "geofuse.manifest"},
      {"version", 1},
      {"tool_version", m.tool_version},
      {"config_digest", m.config_digest},
      {"config", m.config},
      {"started_at", m.started_at},
      {"finished_at", m.finished_at},
      {"status", to_string(m.status())},
      {"datasets", datasets},
  };
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "geofuse.manifest")
    throw std::invalid_argument("not a run manifest document");
  RunManifest m;
  m.tool_version = j.at("tool_version").get<std::string>();
  m.config_digest = j.at("config_digest").get<std::string>();
  m.config = j.value("config", nlohmann::json::object());
  m.started_at = j.value("started_at", "");
  m.finished_at = j.value("finished_at", "");
  for (const auto& dj : j.at("datasets")) {
    DatasetRun d;
    d.name = dj.at("name").get<std::string>();
    d.source = dj.value("source", "");
    if (!dj.at("error").is_null()) d.error = dj["error"].get<std::string>();
    if (!dj.at("meta").is_null()) {
      const auto& mj = dj["meta"];
      d.meta = DatasetMeta{mj.at("n_instances").get<std::size_t>(), mj.at("n_features").get<std::size_t>(),
                           mj.at("n_classes").get<std::size_t>(), mj.at("imbalance_ratio").get<double>()};
    }
    for (const auto& rj : dj.at("results")) {
      CombinerResult r;
      r.combiner = parse_combiner(rj.at("combiner").get<std::string>());
      r.pooled = metric_report_from_json(rj.at("pooled"));
      if (!rj.at("gamma").is_null())
        for (const auto& g : rj["gamma"])
          r.gamma_per_fold.push_back(g.is_null() ? std::nullopt : std::optional<double>(g.get<double>()));
      for (const auto& f : rj.at("folds")) r.folds.push_back(metric_report_from_json(f));
      d.results.push_back(std::move(r));
    }
    d.member_digests = dj.value("member_digests", std::vector<std::vector<std::string>>{});
    d.fold_dims = dj.value("fold_dims", std::vector<std::size_t>{});
    m.datasets.push_back(std::move(d));
  }
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
  nlohmann::json j;
  in >> j;
  return manifest_from_json(j);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string metrics_csv(const RunManifest& m) {
  std::ostringstream os;
  os.precision(17);
  os << "dataset,combiner,criterion,value\n";
  for (const auto& d : m.datasets)
    for (const auto& r : d.results)
      for (auto c : kAllCriteria)
        os << d.name << ',' << to_string(r.combiner) << ',' << to_string(c) << ',' << r.pooled.get(c) << '\n';
  return os.str();
}

void write_run_outputs(const RunManifest& m, const std::filesystem::path& dir) {
  write_file_atomic(dir / "manifest.json", to_json(m).dump(2) + "\n");
  write_file_atomic(dir / "metrics.csv", metrics_csv(m));
}

// ---------------------------------------------------------------------------
// Statistics over manifests

std::map<std::string, stats::ScoreTable> score_tables(const std::vector<RunManifest>& manifests,
                                                      const std::vector<Criterion>& criteria) {
  if (criteria.empty()) throw std::invalid_argument("no criteria requested");
  std::vector<const DatasetRun*> rows;
  std::optional<std::vector<CombinerKind>> combiners;
  for (const auto& m : manifests) {
    for (const auto& d : m.datasets) {
      if (d.error) continue;
      std::vector<CombinerKind> mine;
      for (const auto& r : d.results) mine.push_back(r.combiner);
      if (!combiners) {
        combiners = mine;
      } else if (*combiners != mine) {
        throw std::invalid_argument("mismatched combiner sets across manifests (dataset '" + d.name + "')");
      }
      rows.push_back(&d);
    }
  }
  if (rows.size() < 2) throw std::invalid_argument("insufficient datasets for rank statistics");
  if (combiners->size() < 2) throw std::invalid_argument("rank statistics need at least 2 combiners");

  std::map<std::string, stats::ScoreTable> tables;
  for (auto c : criteria) {
    stats::ScoreTable t;
    t.orientation = higher_is_better(c) ? stats::Orientation::HigherBetter : stats::Orientation::LowerBetter;
    t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(combiners->size()));
    for (auto k : *combiners) t.algorithms.push_back(to_string(k));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      t.datasets.push_back(rows[i]->name);
      for (std::size_t k = 0; k < combiners->size(); ++k)
        t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i]->results[k].pooled.get(c);
    }
    tables.emplace(to_string(c), std::move(t));
  }
  return tables;
}

std::map<std::string, stats::RankReport> stats_report(const std::vector<RunManifest>& manifests,
                                                      const std::vector<Criterion>& criteria,
                                                      const stats::ProcedureOptions& options) {
  return stats::two_step_procedure(score_tables(manifests, criteria), options);
}

void write_stats_outputs(const std::map<std::string, stats::RankReport>& reports,
                         const std::filesystem::path& dir) {
  for (const auto& [name, r] : reports) {
    write_file_atomic(dir / ("rank_" + name + ".csv"), stats::to_csv(r));
    write_file_atomic(dir / ("rank_" + name + ".json"), stats::to_json(r).dump(2) + "\n");
  }
  write_file_atomic(dir / "radar.csv", stats::radar_csv(reports));
}

// ---------------------------------------------------------------------------

DescribeResult describe_datasets(const std::vector<std::filesystem::path>& paths) {
  DescribeResult out;
  for (const auto& p : paths) {
    try {
      const auto ds = load_dataset(p);
      const auto meta = compute_meta(ds);
      out.rows.push_back({p.stem().string(), meta.n_instances, meta.n_features, meta.n_classes,
                          meta.imbalance_ratio});
    } catch (const std::exception& e) {
      out.errors.emplace_back(p.string(), e.what());
    }
  }
  return out;
}

std::string format_description(const DescribeResult& r) {
  std::size_t width = 4;
  for (const auto& row : r.rows) width = std::max(width, row.name.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "Name" << std::right << std::setw(8)
     << "|S|" << std::setw(6) << "d" << std::setw(5) << "C" << std::setw(9) << "IR" << '\n';
  for (const auto& row : r.rows) {
    os << std::left << std::setw(static_cast<int>(width)) << row.name << std::right << std::setw(8)
       << row.n_instances << std::setw(6) << row.n_features << std::setw(5) << row.n_classes
       << std::setw(9) << std::fixed << std::setprecision(2) << row.imbalance_ratio << '\n';
    os.unsetf(std::ios::fixed);
  }
  return os.str();
}

}  // namespace geofuse
