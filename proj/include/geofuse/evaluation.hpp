#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "geofuse/dataset.hpp"
#include "geofuse/linear.hpp"
#include "geofuse/potential.hpp"
#include "json.hpp"

namespace geofuse {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes);

  std::size_t n_classes() const noexcept { return n_; }
  std::size_t at(std::size_t truth, std::size_t pred) const { return counts_.at(truth * n_ + pred); }
  void add(std::size_t truth, std::size_t pred, std::size_t count = 1);
  std::size_t total() const noexcept;
  std::size_t correct() const noexcept;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<std::size_t> counts_;
};

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> pred, std::size_t n_classes);

enum class Criterion { ZeroOne, MaFDR, MaFNR, MaF1, MiFDR, MiFNR, MiF1 };

inline constexpr std::array<Criterion, 7> kAllCriteria = {
    Criterion::ZeroOne, Criterion::MaFDR, Criterion::MaFNR, Criterion::MaF1,
    Criterion::MiFDR,   Criterion::MiFNR, Criterion::MiF1};

std::string to_string(Criterion c);
Criterion parse_criterion(const std::string& name);
/// F1 criteria are gains; the rest are losses.
constexpr bool higher_is_better(Criterion c) noexcept {
  return c == Criterion::MaF1 || c == Criterion::MiF1;
}

struct MetricReport {
  double zero_one = 0.0;
  double ma_fdr = 0.0;
  double ma_fnr = 0.0;
  double ma_f1 = 0.0;
  double mi_fdr = 0.0;
  double mi_fnr = 0.0;
  double mi_f1 = 0.0;

  double get(Criterion c) const;
  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// Per-class precision or recall with an empty denominator counts as 0, as
/// does F1 when precision and recall are both 0. Macro values average the
/// per-class figures over all C classes; micro values pool the counts.
MetricReport compute_metrics(const ConfusionMatrix& cm);

nlohmann::json to_json(const MetricReport& r);
MetricReport metric_report_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Cross-validation

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PipelineSpec {
  bool enabled = true;
  double variance_target = 0.95;
};

struct ModelSpec {
  std::vector<BaseKind> kinds{kAllBaseKinds.begin(), kAllBaseKinds.end()};
  std::vector<CombinerKind> rules{kAllCombiners.begin(), kAllCombiners.end()};
  std::vector<double> gamma_grid = default_gamma_grid();
  std::size_t inner_folds = 3;
  TrainerConfig trainers;
};

struct RuleOutcome {
  CombinerKind rule = CombinerKind::MV;
  std::vector<ConfusionMatrix> fold_confusions;
  std::vector<MetricReport> fold_reports;
  /// Tuned shape coefficient per fold; empty for MV and MA.
  std::vector<std::optional<double>> fold_gamma;
  ConfusionMatrix pooled_confusion{2};
  MetricReport pooled;
};

struct CvResult {
  std::vector<RuleOutcome> rules;
  /// Digests of every trained member per fold (pair-major, kind order).
  std::vector<std::vector<std::string>> fold_member_digests;
  std::vector<std::size_t> fold_output_dims;

  const RuleOutcome& outcome(CombinerKind rule) const;
};

/// Per fold: fit preprocessing on the training split, tune gamma for each
/// potential-based rule by inner CV, train the base members once and fuse
/// them under every configured rule. Inner-fold seeds derive from the plan
/// seed and fold index.
CvResult cross_validate(const Dataset& ds, const FoldPlan& plan, const PipelineSpec& pipeline,
                        const ModelSpec& model);

}  // namespace geofuse
