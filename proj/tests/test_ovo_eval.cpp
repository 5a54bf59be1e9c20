#include <cmath>

#include "doctest.h"
#include "geofuse/evaluation.hpp"
#include "geofuse/ovo.hpp"
#include "geofuse/random.hpp"
#include "geofuse/tuning.hpp"

using namespace geofuse;

namespace {

ConfusionMatrix cm_from(const std::vector<std::vector<std::size_t>>& rows) {
  ConfusionMatrix cm(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t p = 0; p < rows.size(); ++p) cm.add(t, p, rows[t][p]);
  return cm;
}

const std::vector<BaseKind> kFast = {BaseKind::FLDA, BaseKind::NC, BaseKind::LR};

}  // namespace

TEST_CASE("ovo: pair counts and label mapping") {
  const auto two = generate_synthetic(SyntheticKind::TwoGaussians, 80, 0.5, 1);
  const auto m2 = ovo_train(two, CombinerKind::TA, PotentialParams(10.0));
  REQUIRE(m2.pairs.size() == 1);
  CHECK(m2.pairs[0].class_a == 0);
  CHECK(m2.pairs[0].class_b == 1);
  CHECK(m2.pairs[0].ensemble.members().size() == 5);
  for (Eigen::Index i = 0; i < 80; ++i) {
    const auto x = two.features().row(i).transpose();
    const auto bin = ensemble_predict(m2.pairs[0].ensemble, x);
    CHECK(ovo_predict(m2, x) == (bin.label > 0 ? 1 : 0));
  }

  const auto four = generate_synthetic(SyntheticKind::Blobs, 200, 0.5, 1, {.imbalance = 1.0, .classes = 4});
  CHECK(ovo_train(four, CombinerKind::MV, PotentialParams(1.0), kFast).pairs.size() == 6);
}

TEST_CASE("ovo: each pair trains on its two classes only") {
  const auto three = generate_synthetic(SyntheticKind::Blobs, 150, 0.5, 2, {.imbalance = 1.0, .classes = 3});
  const auto members = train_ovo_members(three, std::vector<BaseKind>{BaseKind::NC});
  REQUIRE(members.pairs.size() == 3);
  for (const auto& p : members.pairs) {
    std::vector<std::size_t> rows;
    std::vector<int> y;
    for (std::size_t i = 0; i < three.size(); ++i) {
      const int c = three.labels()[i];
      if (c == p.class_a || c == p.class_b) {
        rows.push_back(i);
        y.push_back(c == p.class_b ? 1 : -1);
      }
    }
    CHECK(rows.size() == 100);
    const Eigen::MatrixXd X = three.features()(rows, Eigen::all);
    const auto direct = train_nc(X, y);
    CHECK((direct.normal - p.members[0].normal).norm() <= 1e-12);
  }
}

TEST_CASE("ovo: vote resolution") {
  const std::vector<double> priors{0.2, 0.3, 0.5};
  CHECK(resolve_votes(std::vector<std::size_t>{2, 1, 0}, priors) == 0);
  CHECK(resolve_votes(std::vector<std::size_t>{1, 1, 1}, std::vector<double>{0.5, 0.3, 0.2}) == 0);
  CHECK(resolve_votes(std::vector<std::size_t>{1, 1, 1}, priors) == 2);
  CHECK(resolve_votes(std::vector<std::size_t>{0, 1, 1}, std::vector<double>{0.2, 0.4, 0.4}) == 1);
}

TEST_CASE("ovo: JSON round trip predicts identically") {
  const auto ds = generate_synthetic(SyntheticKind::Blobs, 90, 0.8, 5, {.imbalance = 1.0, .classes = 3});
  const auto m = ovo_train(ds, CombinerKind::GME, PotentialParams(20.0), kFast);
  const auto back = ovo_from_json(nlohmann::json::parse(to_json(m).dump()));
  for (Eigen::Index i = 0; i < 90; ++i)
    CHECK(ovo_predict(back, ds.features().row(i).transpose()) == ovo_predict(m, ds.features().row(i).transpose()));
}

TEST_CASE("ovo: shared members fuse like assembled models") {
  const auto ds = generate_synthetic(SyntheticKind::Blobs, 120, 1.0, 6, {.imbalance = 1.0, .classes = 3});
  const auto members = train_ovo_members(ds, kAllBaseKinds);
  for (auto rule : kAllCombiners) {
    const PotentialParams p(54.6);
    const auto model = assemble_ovo(members, rule, p);
    const Transform t = uses_potential(rule) ? gaussian_potential(p) : Transform([](double z) { return z; });
    for (Eigen::Index i = 0; i < 120; i += 7) {
      const auto x = ds.features().row(i).transpose();
      CHECK(ovo_predict(members, members.discriminants(x), rule, t) == ovo_predict(model, x));
    }
  }
}

TEST_CASE("confusion matrix") {
  const std::vector<int> t{0, 1, 2, 1};
  const auto cm = confusion(t, t, 3);
  CHECK(cm.at(1, 1) == 2);
  CHECK(cm.correct() == 4);
  const auto anti = confusion(std::vector<int>{0, 1}, std::vector<int>{1, 0}, 2);
  CHECK(anti.at(0, 1) == 1);
  CHECK(anti.at(1, 0) == 1);
  CHECK(anti.correct() == 0);
  CHECK_THROWS(confusion(std::vector<int>{}, std::vector<int>{}, 2));
  CHECK_THROWS(confusion(std::vector<int>{0}, std::vector<int>{0, 1}, 2));
  CHECK_THROWS(confusion(std::vector<int>{0}, std::vector<int>{3}, 2));
}

TEST_CASE("metrics: perfect diagonal") {
  const auto r = compute_metrics(cm_from({{3, 0, 0}, {0, 4, 0}, {0, 0, 5}}));
  CHECK(r.zero_one == 0.0);
  CHECK(r.ma_fdr == 0.0);
  CHECK(r.ma_fnr == 0.0);
  CHECK(r.mi_fdr == 0.0);
  CHECK(r.mi_fnr == 0.0);
  CHECK(r.ma_f1 == 1.0);
  CHECK(r.mi_f1 == 1.0);
}

TEST_CASE("metrics: binary hand example") {
  const auto r = compute_metrics(cm_from({{6, 1}, {1, 2}}));
  CHECK(r.ma_f1 == doctest::Approx((6.0 / 7 + 2.0 / 3) / 2).epsilon(1e-15));
  CHECK(r.ma_f1 == doctest::Approx(0.7619).epsilon(1e-4));
  CHECK(r.zero_one == doctest::Approx(0.2));
  CHECK(r.mi_f1 == doctest::Approx(0.8));
  CHECK(r.ma_fdr == doctest::Approx(1 - (6.0 / 7 + 2.0 / 3) / 2));
}

TEST_CASE("metrics: a class never predicted and never present scores 0") {
  const auto r = compute_metrics(cm_from({{5, 0, 0}, {1, 4, 0}, {0, 0, 0}}));
  CHECK(r.ma_f1 == doctest::Approx((10.0 / 11 + 8.0 / 9 + 0.0) / 3));
  CHECK(r.ma_fnr == doctest::Approx((0.0 + 0.2 + 1.0) / 3));
}

TEST_CASE("metrics: micro identity on random matrices") {
  Rng rng(8);
  for (int t = 0; t < 500; ++t) {
    const std::size_t C = 2 + rng.below(5);
    ConfusionMatrix cm(C);
    for (std::size_t a = 0; a < C; ++a)
      for (std::size_t b = 0; b < C; ++b) cm.add(a, b, rng.below(20));
    cm.add(0, 0);
    const auto r = compute_metrics(cm);
    CHECK(r.mi_fdr == r.zero_one);
    CHECK(r.mi_fnr == r.zero_one);
    CHECK(r.mi_f1 == 1.0 - r.zero_one);
  }
}

TEST_CASE("metrics JSON and criterion names") {
  const auto r = compute_metrics(cm_from({{6, 1}, {1, 2}}));
  CHECK(metric_report_from_json(nlohmann::json::parse(to_json(r).dump())) == r);
  for (auto c : kAllCriteria) CHECK(parse_criterion(to_string(c)) == c);
  CHECK(higher_is_better(Criterion::MaF1));
  CHECK_FALSE(higher_is_better(Criterion::MiFDR));
}

TEST_CASE("cross-validation: separable set is learned") {
  const auto ds = generate_synthetic(SyntheticKind::TwoGaussians, 200, 0.0, 0);
  const auto plan = stratified_kfold(ds, 5, 1);
  ModelSpec model;
  model.gamma_grid = {std::exp(2.0), std::exp(6.0)};
  const auto cv = cross_validate(ds, plan, PipelineSpec{}, model);
  REQUIRE(cv.rules.size() == 7);
  for (const auto& o : cv.rules) {
    CAPTURE(to_string(o.rule));
    CHECK(o.pooled.zero_one <= 0.05);
    CHECK(o.fold_reports.size() == 5);
    CHECK(o.pooled_confusion.total() == 200);
    for (const auto& g : o.fold_gamma) CHECK(g.has_value() == uses_potential(o.rule));
  }
  CHECK(cv.fold_member_digests.size() == 5);
  CHECK(cv.fold_member_digests[0].size() == 5);
}

TEST_CASE("cross-validation: symmetric halves give equal fold reports") {
  // Two mirror-image halves: fold 1 is fold 0 reflected through the origin
  // with labels swapped, so every trained plane and prediction mirrors too.
  const int n = 20;
  Eigen::MatrixXd X(2 * n, 2);
  std::vector<int> y(2 * n);
  std::vector<std::size_t> assign(2 * n);
  Rng rng(4);
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    const double sx = label ? 1.0 : -1.0;
    X(i, 0) = sx + 0.3 * rng.normal();
    X(i, 1) = 0.3 * rng.normal();
    y[static_cast<std::size_t>(i)] = label;
    X(n + i, 0) = -X(i, 0);
    X(n + i, 1) = -X(i, 1);
    y[static_cast<std::size_t>(n + i)] = 1 - label;
    assign[static_cast<std::size_t>(i)] = 0;
    assign[static_cast<std::size_t>(n + i)] = 1;
  }
  const Dataset ds(X, y, {"a", "b"}, {"p", "q"});
  const FoldPlan plan(2, assign, 0);
  ModelSpec model;
  model.kinds = {BaseKind::FLDA, BaseKind::NC, BaseKind::LR};
  model.rules = {CombinerKind::MV, CombinerKind::MA};
  const auto cv = cross_validate(ds, plan, PipelineSpec{.enabled = false}, model);
  for (const auto& o : cv.rules)
    for (auto c : kAllCriteria)
      CHECK(std::abs(o.fold_reports[0].get(c) - o.fold_reports[1].get(c)) <= 1e-12);
}

TEST_CASE("cross-validation: deterministic and fold-shared") {
  const auto ds = generate_synthetic(SyntheticKind::Banana, 120, 0.2, 3);
  const auto plan = stratified_kfold(ds, 3, 9);
  ModelSpec model;
  model.gamma_grid = {std::exp(3.0), std::exp(7.0)};
  const auto a = cross_validate(ds, plan, PipelineSpec{}, model);
  const auto b = cross_validate(ds, plan, PipelineSpec{}, model);
  CHECK(a.fold_member_digests == b.fold_member_digests);
  for (std::size_t r = 0; r < a.rules.size(); ++r) {
    CHECK(a.rules[r].pooled == b.rules[r].pooled);
    CHECK(a.rules[r].fold_gamma == b.rules[r].fold_gamma);
  }
  // Evaluating one rule alone trains the same members.
  model.rules = {CombinerKind::MIN};
  const auto single = cross_validate(ds, plan, PipelineSpec{}, model);
  CHECK(single.fold_member_digests == a.fold_member_digests);
  CHECK(single.rules[0].pooled == a.outcome(CombinerKind::MIN).pooled);
}

TEST_CASE("cross-validation: missing class in a training split") {
  Eigen::MatrixXd X(9, 1);
  X << 0, 1, 2, 3, 4, 5, 6, 7, 8;
  const Dataset ds(X, {0, 0, 0, 0, 0, 0, 1, 1, 1}, {"a"}, {"p", "q"});
  const FoldPlan plan(2, {0, 0, 0, 1, 1, 1, 1, 1, 1}, 0);
  try {
    cross_validate(ds, plan, PipelineSpec{.enabled = false}, ModelSpec{});
    FAIL("expected an EvaluationError");
  } catch (const EvaluationError& e) {
    CAPTURE(std::string(e.what()));
    CHECK(std::string(e.what()).find("fold 1") != std::string::npos);
  }
}

TEST_CASE("tuning: grid of one and tie rule") {
  const auto ds = generate_synthetic(SyntheticKind::TwoGaussians, 60, 0.5, 2);
  const std::vector<double> one{42.0};
  CHECK(tune_gamma(ds, kFast, CombinerKind::TA, one).gamma() == 42.0);

  const std::vector<GammaScore> tied{{50.0, 0.8}, {7.0, 0.8}, {20.0, 0.7}};
  CHECK(select_gamma(tied) == 7.0);
  const std::vector<GammaScore> clear{{50.0, 0.9}, {7.0, 0.8}};
  CHECK(select_gamma(clear) == 50.0);
}

TEST_CASE("tuning: selected gamma maximizes the inner score") {
  const auto ds = generate_synthetic(SyntheticKind::Banana, 150, 0.3, 8);
  const auto grid = default_gamma_grid();
  const std::vector<CombinerKind> rules{CombinerKind::TA, CombinerKind::GME};
  TuningOptions opts;
  opts.seed = 77;
  const auto scores = score_gamma_grid(ds, kFast, rules, grid, opts);
  const auto tuned = tune_gamma_all(ds, kFast, rules, grid, opts);
  for (auto rule : rules) {
    double best = -1;
    for (const auto& s : scores.at(rule)) best = std::max(best, s.macro_f1);
    double first = 0;
    for (const auto& s : scores.at(rule))
      if (s.macro_f1 == best) {
        first = s.gamma;
        break;
      }
    CHECK(tuned.at(rule).gamma() == first);
  }
}

TEST_CASE("tuning: degenerate inner folds") {
  Eigen::MatrixXd X(5, 1);
  X << 0, 1, 2, 3, 4;
  const Dataset ds(X, {0, 0, 0, 0, 1}, {"a"}, {"p", "q"});
  const std::vector<double> grid{1.0, 2.0};
  CHECK_THROWS_AS(tune_gamma(ds, kFast, CombinerKind::TA, grid), EvaluationError);
}
