// geofuse command line: run, stats, describe, generate.

#include <iostream>

#include "CLI11.hpp"
#include "geofuse/bench.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> folds;
  std::vector<std::string> combiners;
  bool quiet = false;
};

struct StatsArgs {
  std::vector<std::string> manifests;
  std::string out = ".";
  double alpha = 0.05;
  std::vector<std::string> criteria;
  bool holm_fallback = false;
  bool iman_davenport = false;
};

struct GenerateArgs {
  std::string kind = "two-gaussians";
  std::size_t n = 400;
  double noise = 1.0;
  std::uint64_t seed = 0;
  double imbalance = 1.0;
  std::size_t classes = 3;
  std::string out;
};

int do_run(const RunArgs& a) {
  geofuse::ExperimentConfig cfg;
  try {
    cfg = geofuse::load_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    if (a.out) cfg.output_dir = *a.out;
    if (a.folds) cfg.folds = *a.folds;
    if (!a.combiners.empty()) {
      cfg.combiners.clear();
      for (const auto& c : a.combiners) cfg.combiners.push_back(geofuse::parse_combiner(c));
    }
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const auto manifest = geofuse::run_benchmark(cfg, a.quiet ? nullptr : &std::cerr);
  geofuse::write_run_outputs(manifest, cfg.output_dir);
  const auto status = manifest.status();
  std::cout << "status: " << geofuse::to_string(status) << "\nmanifest: "
            << (cfg.output_dir / "manifest.json").string() << '\n';
  return status == geofuse::RunStatus::Complete ? kExitOk : kExitPartial;
}

int do_stats(const StatsArgs& a) {
  std::vector<geofuse::RunManifest> manifests;
  std::vector<geofuse::Criterion> criteria;
  try {
    for (const auto& m : a.manifests) manifests.push_back(geofuse::load_manifest(m));
    if (a.criteria.empty()) {
      criteria.assign(geofuse::kAllCriteria.begin(), geofuse::kAllCriteria.end());
    } else {
      for (const auto& c : a.criteria) criteria.push_back(geofuse::parse_criterion(c));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  geofuse::stats::ProcedureOptions opts;
  opts.alpha = a.alpha;
  opts.holm_fallback = a.holm_fallback;
  if (a.iman_davenport) opts.friedman = geofuse::stats::FriedmanVariant::ImanDavenport;
  try {
    const auto reports = geofuse::stats_report(manifests, criteria, opts);
    geofuse::write_stats_outputs(reports, a.out);
    for (const auto& [name, r] : reports) std::cout << geofuse::stats::to_csv(r) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPartial;
  }
  return kExitOk;
}

int do_describe(const std::vector<std::string>& paths) {
  std::vector<std::filesystem::path> ps(paths.begin(), paths.end());
  const auto r = geofuse::describe_datasets(ps);
  std::cout << geofuse::format_description(r);
  for (const auto& [path, msg] : r.errors) std::cerr << path << ": " << msg << '\n';
  return r.errors.empty() ? kExitOk : kExitPartial;
}

int do_generate(const GenerateArgs& a) {
  try {
    geofuse::SyntheticOptions opts;
    opts.imbalance = a.imbalance;
    opts.classes = a.classes;
    const auto ds = geofuse::generate_synthetic(geofuse::parse_synthetic_kind(a.kind), a.n, a.noise, a.seed, opts);
    geofuse::write_csv(ds, a.out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potential-function fusion of linear classifier ensembles"};
  app.set_version_flag("--version", std::string(geofuse::kToolVersion));
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Cross-validate every combiner on every configured dataset");
  run->add_option("--config", run_args.config, "JSON experiment configuration")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", run_args.seed, "Override the experiment seed");
  run->add_option("--out", run_args.out, "Override the output directory");
  run->add_option("--folds", run_args.folds, "Override the number of folds");
  run->add_option("--combiners", run_args.combiners, "Comma-separated subset of MV,MA,TA,TME,MAX,MIN,GME")
      ->delimiter(',');
  run->add_flag("--quiet", run_args.quiet, "No per-dataset progress on stderr");

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Rank statistics over one or more run manifests");
  stats->add_option("manifests", stats_args.manifests, "manifest.json files")->required()->check(CLI::ExistingFile);
  stats->add_option("--out", stats_args.out, "Directory for rank reports")->capture_default_str();
  stats->add_option("--alpha", stats_args.alpha, "Significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  stats->add_option("--criteria", stats_args.criteria, "Comma-separated criteria (default: all seven)")
      ->delimiter(',');
  stats->add_flag("--holm-fallback", stats_args.holm_fallback, "Holm instead of Bergmann-Hommel for pairwise tests");
  stats->add_flag("--iman-davenport", stats_args.iman_davenport, "Iman-Davenport F form of the Friedman test");

  std::vector<std::string> describe_paths;
  auto* describe = app.add_subcommand("describe", "Print |S|, d, C and IR for dataset files");
  describe->add_option("paths", describe_paths, "CSV or ARFF files");

  GenerateArgs gen_args;
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset as CSV");
  generate->add_option("--kind", gen_args.kind, "two-gaussians, banana, spirals, linear or blobs")->capture_default_str();
  generate->add_option("-n,--samples", gen_args.n, "Number of instances")->capture_default_str();
  generate->add_option("--noise", gen_args.noise, "Noise level")->capture_default_str();
  generate->add_option("--seed", gen_args.seed, "Random seed")->capture_default_str();
  generate->add_option("--imbalance", gen_args.imbalance, "Majority-to-minority ratio")->capture_default_str();
  generate->add_option("--classes", gen_args.classes, "Class count for blobs")->capture_default_str();
  generate->add_option("--out", gen_args.out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return do_run(run_args);
    if (*stats) return do_stats(stats_args);
    if (*describe) return do_describe(describe_paths);
    if (*generate) return do_generate(gen_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPartial;
  }
  return kExitOk;
}
