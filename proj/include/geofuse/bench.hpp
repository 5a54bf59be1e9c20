#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "geofuse/dataset.hpp"
#include "geofuse/evaluation.hpp"
#include "geofuse/linear.hpp"
#include "geofuse/potential.hpp"
#include "geofuse/stats.hpp"
#include "json.hpp"

namespace geofuse {

inline constexpr const char* kToolVersion = "geofuse 0.1.0";

/// Invalid experiment configuration (CLI exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeneratorSpec {
  SyntheticKind kind = SyntheticKind::TwoGaussians;
  std::size_t n = 400;
  double noise = 1.0;
  std::optional<std::uint64_t> seed;  // defaults to the experiment seed
  SyntheticOptions options;
};

struct DatasetEntry {
  std::string name;
  std::optional<std::filesystem::path> path;
  std::optional<GeneratorSpec> generator;
};

struct ExperimentConfig {
  std::vector<DatasetEntry> datasets;
  std::vector<CombinerKind> combiners{kAllCombiners.begin(), kAllCombiners.end()};
  std::vector<BaseKind> base_kinds{kAllBaseKinds.begin(), kAllBaseKinds.end()};
  std::size_t folds = 10;
  std::vector<double> gamma_grid = default_gamma_grid();
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "results";
  std::size_t inner_folds = 3;
  PipelineSpec pipeline;
  TrainerConfig trainers;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// Reads the JSON configuration format. Relative dataset paths resolve
/// against `base_dir`. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Stable digest of the canonical configuration (output_dir excluded).
std::string config_digest(const ExperimentConfig& cfg);

struct CombinerResult {
  CombinerKind combiner = CombinerKind::MV;
  /// Tuned gamma per fold; empty optionals for the gamma-free rules.
  std::vector<std::optional<double>> gamma_per_fold;
  MetricReport pooled;
  std::vector<MetricReport> folds;
};

struct DatasetRun {
  std::string name;
  std::string source;
  std::optional<DatasetMeta> meta;
  std::optional<std::string> error;
  std::vector<CombinerResult> results;
  std::vector<std::vector<std::string>> member_digests;
  std::vector<std::size_t> fold_dims;
};

enum class RunStatus { Complete, Partial, Failed };

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string config_digest;
  nlohmann::json config;
  std::string started_at;
  std::string finished_at;
  std::vector<DatasetRun> datasets;

  RunStatus status() const;
};

std::string to_string(RunStatus s);

/// Per dataset: load or generate, split into stratified folds and run the
/// cross-validation driver once, which shares fold assignments and trained
/// base members across all combiners. Dataset failures become error records.
RunManifest run_benchmark(const ExperimentConfig& cfg, std::ostream* log = nullptr);

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
RunManifest load_manifest(const std::filesystem::path& path);

/// Writes through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// manifest.json and metrics.csv under `dir`.
void write_run_outputs(const RunManifest& m, const std::filesystem::path& dir);

std::string metrics_csv(const RunManifest& m);

/// Score tables per criterion built from the completed datasets of all
/// manifests, then the two-step procedure.
std::map<std::string, stats::RankReport> stats_report(const std::vector<RunManifest>& manifests,
                                                      const std::vector<Criterion>& criteria,
                                                      const stats::ProcedureOptions& options);

std::map<std::string, stats::ScoreTable> score_tables(const std::vector<RunManifest>& manifests,
                                                      const std::vector<Criterion>& criteria);

/// rank_<criterion>.csv / .json per report plus radar.csv.
void write_stats_outputs(const std::map<std::string, stats::RankReport>& reports,
                         const std::filesystem::path& dir);

struct DatasetDescription {
  std::string name;
  std::size_t n_instances = 0;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  double imbalance_ratio = 1.0;
};

struct DescribeResult {
  std::vector<DatasetDescription> rows;
  std::vector<std::pair<std::string, std::string>> errors;  // (path, message)
};

DescribeResult describe_datasets(const std::vector<std::filesystem::path>& paths);

/// Name, |S|, d, C, IR as an aligned text table (IR to two decimals).
std::string format_description(const DescribeResult& r);

}  // namespace geofuse
