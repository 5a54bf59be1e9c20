#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace geofuse::stats {

enum class Orientation { HigherBetter, LowerBetter };

/// One criterion's results: rows are datasets, columns algorithms.
struct ScoreTable {
  Eigen::MatrixXd values;
  Orientation orientation = Orientation::LowerBetter;
  std::vector<std::string> algorithms;
  std::vector<std::string> datasets;

  std::size_t n_datasets() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t n_algorithms() const noexcept { return static_cast<std::size_t>(values.cols()); }
  /// Throws std::invalid_argument unless D >= 2, K >= 2 and all entries are finite.
  void validate() const;
};

/// Ranks of one row, 1 = best under `orientation`, ties share the mean rank.
std::vector<double> rank_row(std::span<const double> row, Orientation orientation);

/// Per-dataset rank matrix, same shape as the table.
Eigen::MatrixXd rank_matrix(const ScoreTable& t);

std::vector<double> average_ranks(const ScoreTable& t);

enum class FriedmanVariant { ChiSquare, ImanDavenport };

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double df1 = 0.0;
  double df2 = 0.0;  // Iman-Davenport denominator degrees of freedom; 0 for chi-square
};

/// Tie-corrected Friedman chi-square on K-1 degrees of freedom, or the
/// Iman-Davenport F form of the same statistic. A table in which every row
/// is fully tied yields statistic 0 and p = 1.
FriedmanResult friedman_test(const ScoreTable& t, FriedmanVariant variant = FriedmanVariant::ChiSquare);

struct WilcoxonResult {
  std::size_t n = 0;  // non-zero differences
  double w_plus = 0.0;
  double w_minus = 0.0;
  double statistic = 0.0;  // min(W+, W-)
  double p_value = 1.0;
  bool exact = true;
};

inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// Two-sided signed-rank test on a - b. Zero differences are dropped and
/// tied magnitudes get averaged ranks. For n <= 25 the null distribution is
/// enumerated exactly; above that a tie- and continuity-corrected normal
/// approximation is used.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Multiple-comparison control

inline constexpr std::size_t kMaxPairwiseAlgorithms = 9;

struct Adjusted {
  std::vector<double> adjusted;
  std::vector<bool> rejected;
};

/// Index of the hypothesis comparing algorithms i < j among K, row-major.
std::size_t pair_index(std::size_t i, std::size_t j, std::size_t K);

/// Every non-empty exhaustive set of the all-pairs family over K algorithms:
/// one set per partition of the algorithms into groups, holding the pairs
/// that lie within a group.
std::vector<std::vector<std::size_t>> pairwise_exhaustive_sets(std::size_t K);

/// Bergmann-Hommel for all pairwise comparisons of K <= 9 algorithms; p is
/// indexed by pair_index. H_i is rejected iff no exhaustive set E containing
/// i has min_{j in E} p_j > alpha/|E|; the adjusted value is the smallest
/// alpha at which H_i is rejected.
Adjusted bergmann_hommel_pairwise(std::span<const double> p, std::size_t K, double alpha);

/// Bergmann-Hommel for a family whose hypotheses are logically independent,
/// where every subset is exhaustive. This coincides with Holm's step-down.
Adjusted bergmann_hommel_independent(std::span<const double> p, double alpha);

Adjusted holm_adjust(std::span<const double> p, double alpha);

// ---------------------------------------------------------------------------

struct ProcedureOptions {
  double alpha = 0.05;
  FriedmanVariant friedman = FriedmanVariant::ChiSquare;
  /// Use Holm for the pairwise step (required when K > 9).
  bool holm_fallback = false;
};

struct RankReport {
  std::string criterion;
  std::vector<std::string> algorithms;
  std::size_t n_datasets = 0;
  double alpha = 0.05;
  std::vector<double> avg_ranks;
  std::string friedman_variant;
  double friedman_statistic = 0.0;
  double friedman_p = 1.0;
  /// Friedman p adjusted across the criterion family.
  double friedman_p_adjusted = 1.0;
  bool friedman_rejected = false;
  std::string family_control;
  std::string pairwise_control;
  /// K x K symmetric adjusted Wilcoxon p-values; empty when the Friedman
  /// step does not reject.
  Eigen::MatrixXd pairwise_p;
  Eigen::MatrixXd pairwise_raw_p;
};

/// Friedman per criterion with Bergmann-Hommel control over the family of
/// criteria, then pairwise Wilcoxon tests with Bergmann-Hommel control for
/// every criterion whose Friedman test rejects. Keyed (and so ordered) by
/// criterion name.
std::map<std::string, RankReport> two_step_procedure(const std::map<std::string, ScoreTable>& tables,
                                                     const ProcedureOptions& options = {});

/// Three decimals; values below 1e-3 print as 0.000 and above 0.999 as 1.000.
std::string format_p(double p);

nlohmann::json to_json(const RankReport& r);

/// Rows: criterion header, Frd, Rnk, then the upper-triangular p matrix.
std::string to_csv(const RankReport& r);

/// criterion,algorithm,avg_rank triples for every report.
std::string radar_csv(const std::map<std::string, RankReport>& reports);

/// Structural check of a serialized RankReport; returns the problems found.
std::vector<std::string> validate_rank_report(const nlohmann::json& j);

}  // namespace geofuse::stats
