#include "geofuse/tuning.hpp"

#include <stdexcept>

#include "geofuse/evaluation.hpp"
#include "geofuse/ovo.hpp"

namespace geofuse {

std::map<CombinerKind, std::vector<GammaScore>> score_gamma_grid(
    const Dataset& train, std::span<const BaseKind> kinds, std::span<const CombinerKind> rules,
    std::span<const double> grid, const TuningOptions& options) {
  if (grid.empty()) throw std::invalid_argument("gamma grid is empty");
  std::vector<Transform> transforms;
  for (double g : grid) transforms.push_back(gaussian_potential(PotentialParams(g)));

  const std::size_t C = train.n_classes();
  std::map<CombinerKind, std::vector<ConfusionMatrix>> confusions;
  for (auto rule : rules) confusions.emplace(rule, std::vector<ConfusionMatrix>(grid.size(), ConfusionMatrix(C)));

  FoldPlan plan = [&] {
    try {
      return stratified_kfold(train, options.inner_folds, options.seed);
    } catch (const DataError& e) {
      throw EvaluationError(std::string("degenerate inner folds: ") + e.what());
    }
  }();

  const auto& X = train.features();
  for (std::size_t f = 0; f < plan.k(); ++f) {
    const auto train_rows = plan.train_indices(f);
    std::vector<std::size_t> seen(C, 0);
    for (auto i : train_rows) ++seen[static_cast<std::size_t>(train.labels()[i])];
    for (std::size_t c = 0; c < C; ++c)
      if (seen[c] == 0)
        throw EvaluationError("degenerate inner folds: inner fold " + std::to_string(f) +
                              " has no training instance of class '" + train.class_names()[c] + "'");

    const auto members = train_ovo_members(train.subset(train_rows), kinds, options.trainers);
    for (auto i : plan.test_indices(f)) {
      const auto disc = members.discriminants(X.row(static_cast<Eigen::Index>(i)).transpose());
      const auto truth = static_cast<std::size_t>(train.labels()[i]);
      for (auto rule : rules) {
        auto& cms = confusions.at(rule);
        if (!uses_potential(rule)) {
          // gamma-free: one evaluation serves the whole grid
          const auto pred = static_cast<std::size_t>(ovo_predict(members, disc, rule, transforms[0]));
          for (auto& cm : cms) cm.add(truth, pred);
          continue;
        }
        for (std::size_t g = 0; g < grid.size(); ++g)
          cms[g].add(truth, static_cast<std::size_t>(ovo_predict(members, disc, rule, transforms[g])));
      }
    }
  }

  std::map<CombinerKind, std::vector<GammaScore>> out;
  for (auto& [rule, cms] : confusions) {
    auto& scores = out[rule];
    for (std::size_t g = 0; g < grid.size(); ++g)
      scores.push_back({grid[g], compute_metrics(cms[g]).ma_f1});
  }
  return out;
}

double select_gamma(std::span<const GammaScore> scores) {
  if (scores.empty()) throw std::invalid_argument("no gamma candidates");
  GammaScore best = scores.front();
  for (const auto& s : scores.subspan(1)) {
    if (s.macro_f1 > best.macro_f1 || (s.macro_f1 == best.macro_f1 && s.gamma < best.gamma))
      best = s;
  }
  return best.gamma;
}

std::map<CombinerKind, PotentialParams> tune_gamma_all(const Dataset& train,
                                                        std::span<const BaseKind> kinds,
                                                        std::span<const CombinerKind> rules,
                                                        std::span<const double> grid,
                                                        const TuningOptions& options) {
  if (grid.empty()) throw std::invalid_argument("gamma grid is empty");
  std::map<CombinerKind, PotentialParams> out;
  if (grid.size() == 1) {
    for (auto rule : rules) out.emplace(rule, PotentialParams(grid.front()));
    return out;
  }
  for (const auto& [rule, scores] : score_gamma_grid(train, kinds, rules, grid, options))
    out.emplace(rule, PotentialParams(select_gamma(scores)));
  return out;
}

PotentialParams tune_gamma(const Dataset& train, std::span<const BaseKind> kinds, CombinerKind rule,
                           std::span<const double> grid, const TuningOptions& options) {
  const CombinerKind rules[] = {rule};
  return tune_gamma_all(train, kinds, rules, grid, options).at(rule);
}

}  // namespace geofuse
