#include "geofuse/evaluation.hpp"

#include <algorithm>

#include "geofuse/ovo.hpp"
#include "geofuse/preprocessing.hpp"
#include "geofuse/random.hpp"
#include "geofuse/tuning.hpp"

namespace geofuse {

ConfusionMatrix::ConfusionMatrix(std::size_t n_classes)
    : n_(n_classes), counts_(n_classes * n_classes, 0) {
  if (n_classes < 1) throw std::invalid_argument("confusion matrix needs at least one class");
}

void ConfusionMatrix::add(std::size_t truth, std::size_t pred, std::size_t count) {
  if (truth >= n_ || pred >= n_)
    throw std::out_of_range("label out of range for " + std::to_string(n_) + "-class confusion matrix");
  counts_[truth * n_ + pred] += count;
}

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::size_t ConfusionMatrix::correct() const noexcept {
  std::size_t t = 0;
  for (std::size_t c = 0; c < n_; ++c) t += counts_[c * n_ + c];
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.n_ != n_) throw std::invalid_argument("confusion matrices differ in class count");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> pred, std::size_t n_classes) {
  if (truth.size() != pred.size()) throw std::invalid_argument("truth and prediction lengths differ");
  if (truth.empty()) throw std::invalid_argument("confusion matrix of empty inputs");
  ConfusionMatrix cm(n_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || pred[i] < 0) throw std::out_of_range("negative class label");
    cm.add(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(pred[i]));
  }
  return cm;
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::ZeroOne: return "ZeroOne";
    case Criterion::MaFDR: return "MaFDR";
    case Criterion::MaFNR: return "MaFNR";
    case Criterion::MaF1: return "MaF1";
    case Criterion::MiFDR: return "MiFDR";
    case Criterion::MiFNR: return "MiFNR";
    case Criterion::MiF1: return "MiF1";
  }
  return "?";
}

Criterion parse_criterion(const std::string& name) {
  for (auto c : kAllCriteria)
    if (to_string(c) == name) return c;
  throw std::invalid_argument("unknown criterion '" + name + "'");
}

double MetricReport::get(Criterion c) const {
  switch (c) {
    case Criterion::ZeroOne: return zero_one;
    case Criterion::MaFDR: return ma_fdr;
    case Criterion::MaFNR: return ma_fnr;
    case Criterion::MaF1: return ma_f1;
    case Criterion::MiFDR: return mi_fdr;
    case Criterion::MiFNR: return mi_fnr;
    case Criterion::MiF1: return mi_f1;
  }
  return 0.0;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

double harmonic(double p, double r) {
  if (p == r) return p;
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

}  // namespace

MetricReport compute_metrics(const ConfusionMatrix& cm) {
  const std::size_t C = cm.n_classes();
  const std::size_t total = cm.total();
  if (total == 0) throw std::invalid_argument("metrics of an empty confusion matrix");

  MetricReport r;
  for (std::size_t c = 0; c < C; ++c) {
    std::size_t predicted = 0, actual = 0;
    for (std::size_t k = 0; k < C; ++k) {
      predicted += cm.at(k, c);
      actual += cm.at(c, k);
    }
    const std::size_t tp = cm.at(c, c);
    const double precision = ratio(tp, predicted);
    const double recall = ratio(tp, actual);
    r.ma_fdr += 1.0 - precision;
    r.ma_fnr += 1.0 - recall;
    r.ma_f1 += harmonic(precision, recall);
  }
  r.ma_fdr /= static_cast<double>(C);
  r.ma_fnr /= static_cast<double>(C);
  r.ma_f1 /= static_cast<double>(C);

  // Single-label: pooled false positives and false negatives both equal the
  // number of errors.
  const std::size_t errors = total - cm.correct();
  r.zero_one = ratio(errors, total);
  r.mi_fdr = ratio(errors, total);
  r.mi_fnr = ratio(errors, total);
  r.mi_f1 = harmonic(1.0 - r.mi_fdr, 1.0 - r.mi_fnr);
  return r;
}

nlohmann::json to_json(const MetricReport& r) {
  nlohmann::json j;
  for (auto c : kAllCriteria) j[to_string(c)] = r.get(c);
  return j;
}

MetricReport metric_report_from_json(const nlohmann::json& j) {
  MetricReport r;
  r.zero_one = j.at("ZeroOne").get<double>();
  r.ma_fdr = j.at("MaFDR").get<double>();
  r.ma_fnr = j.at("MaFNR").get<double>();
  r.ma_f1 = j.at("MaF1").get<double>();
  r.mi_fdr = j.at("MiFDR").get<double>();
  r.mi_fnr = j.at("MiFNR").get<double>();
  r.mi_f1 = j.at("MiF1").get<double>();
  return r;
}

// ---------------------------------------------------------------------------

const RuleOutcome& CvResult::outcome(CombinerKind rule) const {
  for (const auto& r : rules)
    if (r.rule == rule) return r;
  throw std::out_of_range("rule " + to_string(rule) + " was not evaluated");
}

CvResult cross_validate(const Dataset& ds, const FoldPlan& plan, const PipelineSpec& pipeline,
                        const ModelSpec& model) {
  if (plan.assignments().size() != ds.size())
    throw std::invalid_argument("fold plan does not match dataset size");
  if (model.rules.empty()) throw std::invalid_argument("no combination rules configured");
  const std::size_t C = ds.n_classes();

  CvResult result;
  for (auto rule : model.rules) {
    RuleOutcome o;
    o.rule = rule;
    o.pooled_confusion = ConfusionMatrix(C);
    result.rules.push_back(std::move(o));
  }

  std::vector<CombinerKind> tuned_rules;
  for (auto rule : model.rules)
    if (uses_potential(rule)) tuned_rules.push_back(rule);

  for (std::size_t f = 0; f < plan.k(); ++f) {
    const auto train_rows = plan.train_indices(f);
    const auto test_rows = plan.test_indices(f);
    std::vector<std::size_t> seen(C, 0);
    for (auto i : train_rows) ++seen[static_cast<std::size_t>(ds.labels()[i])];
    for (std::size_t c = 0; c < C; ++c)
      if (seen[c] == 0)
        throw EvaluationError("fold " + std::to_string(f) + ": class '" + ds.class_names()[c] +
                              "' missing from the training split");

    Dataset train = ds.subset(train_rows);
    Eigen::MatrixXd test_X = ds.features()(test_rows, Eigen::all);
    if (pipeline.enabled) {
      const auto p = fit_pipeline(train, pipeline.variance_target);
      train = transform(p, train);
      test_X = apply_pipeline(p, test_X);
    }
    result.fold_output_dims.push_back(train.dim());

    std::map<CombinerKind, PotentialParams> gammas;
    if (!tuned_rules.empty()) {
      TuningOptions opts{model.inner_folds, derive_seed(plan.seed(), "inner-cv", f), model.trainers};
      try {
        gammas = tune_gamma_all(train, model.kinds, tuned_rules, model.gamma_grid, opts);
      } catch (const EvaluationError& e) {
        throw EvaluationError("fold " + std::to_string(f) + ": " + e.what());
      }
    }

    const auto members = train_ovo_members(train, model.kinds, model.trainers);
    std::vector<std::string> digests;
    for (const auto& p : members.pairs)
      for (const auto& h : p.members) digests.push_back(digest(h));
    result.fold_member_digests.push_back(std::move(digests));

    std::vector<Transform> transforms;
    for (const auto& o : result.rules) {
      const auto it = gammas.find(o.rule);
      transforms.push_back(it != gammas.end() ? gaussian_potential(it->second)
                                              : Transform([](double z) { return z; }));
    }

    std::vector<ConfusionMatrix> fold_cms(result.rules.size(), ConfusionMatrix(C));
    for (std::size_t t = 0; t < test_rows.size(); ++t) {
      const auto disc = members.discriminants(test_X.row(static_cast<Eigen::Index>(t)).transpose());
      const auto truth = static_cast<std::size_t>(ds.labels()[test_rows[t]]);
      for (std::size_t r = 0; r < result.rules.size(); ++r)
        fold_cms[r].add(truth, static_cast<std::size_t>(
                                   ovo_predict(members, disc, result.rules[r].rule, transforms[r])));
    }

    for (std::size_t r = 0; r < result.rules.size(); ++r) {
      auto& o = result.rules[r];
      const auto it = gammas.find(o.rule);
      o.fold_gamma.push_back(it != gammas.end() ? std::optional<double>(it->second.gamma())
                                                : std::nullopt);
      o.fold_reports.push_back(compute_metrics(fold_cms[r]));
      o.pooled_confusion += fold_cms[r];
      o.fold_confusions.push_back(std::move(fold_cms[r]));
    }
  }
  for (auto& o : result.rules) o.pooled = compute_metrics(o.pooled_confusion);
  return result;
}

}  // namespace geofuse
